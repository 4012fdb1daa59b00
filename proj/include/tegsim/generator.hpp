#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tegsim/error.hpp"
#include "tegsim/geometry.hpp"
#include "tegsim/leg_thermal.hpp"
#include "tegsim/materials.hpp"
#include "tegsim/parallel.hpp"
#include "tegsim/thermal_network.hpp"
#include "tegsim/units.hpp"

namespace tegsim {

inline constexpr double kStefanBoltzmann = 5.670374419e-8;  // W/(m^2 K^4)

// Operating conditions of a device worn on the body.
struct Environment {
  double T_source = 310.15;   // K, body core
  double T_ambient = 295.15;  // K
  double body_specific_resistance = 300.0 * units::K_cm2_per_W;  // K*m^2/W
  double body_contact_area = 3.0 * units::cm2;
  double R_hot_plate = 0.0;
  double R_cold_plate = 0.0;
  double radiator_area = 10.0 * units::cm2;
  double h_natural = 10.0;  // W/(m^2 K)
  double h_forced = 50.0;
  bool forced_convection = false;
  bool radiation = false;
  double emissivity = 0.9;

  friend bool operator==(const Environment&, const Environment&) = default;
};

struct GeneratorDesign {
  int n_couples = 2350;
  CoupleMaterials materials = builtin_poly_sige();
  UnitCell cell;
  RimLayout layout;
  double contact_area = 0.0;  // m^2 per junction; 0 takes a*a
  double interconnect_resistance = 0.0;  // ohm per couple
  double gap_conductivity = kAirConductivity;  // fill of the etched rim gap

  const ThermocoupleGeometry& geometry() const { return cell.geometry; }
  friend bool operator==(const GeneratorDesign&, const GeneratorDesign&) = default;
};

enum class FlowMode { Network, ConstantFlow };

inline const char* to_string(FlowMode m) { return m == FlowMode::Network ? "network" : "constant_flow"; }

struct ThermalModel {
  Backend backend = Backend::Analytic;
  NumericOptions numeric;
};

struct SimulationOptions {
  ThermalModel model;
  FlowMode mode = FlowMode::Network;
  double heat_flow = 0.0;  // W through the parallel block, constant-flow mode only
};

struct GeneratorReport {
  int n_couples = 0;
  FlowMode mode = FlowMode::Network;
  double V_oc = 0.0;        // V
  double R_internal = 0.0;  // ohm
  double P_matched = 0.0;   // W
  double dT_junctions = 0.0;
  double Q_total = 0.0;
  double Q_pile = 0.0;
  double areal_voltage_density = 0.0;  // mV/(K cm^2)
  double R_cell = 0.0;
  double R_pile = 0.0;
  double R_gap = 0.0;
  double device_area = 0.0;  // m^2
};

inline double effective_contact_area(const GeneratorDesign& d) {
  const double a = d.cell.geometry.end_width_a;
  return d.contact_area > 0.0 ? d.contact_area : a * a;
}

inline double device_area(const GeneratorDesign& d) { return d.layout.die_side * d.layout.die_side; }

inline RimLayout layout_for(const GeneratorDesign& d) {
  RimLayout l = d.layout;
  l.n_couples = d.n_couples;
  return l;
}

inline void validate(const GeneratorDesign& d) {
  detail::validate(d.n_couples >= 1, "design: n_couples >= 1 violated");
  validate(d.materials);
  validate(d.cell);
  validate(d.layout);
  detail::validate(d.contact_area >= 0.0, "design: contact_area >= 0 violated");
  detail::validate(d.interconnect_resistance >= 0.0, "design: interconnect_resistance >= 0 violated");
  detail::validate(d.gap_conductivity > 0.0, "design: gap_conductivity > 0 violated");
  const RimCheck rim = validate_rim(layout_for(d));
  if (!rim.ok) {
    std::ostringstream msg;
    msg << "design: rim capacity exceeded, " << d.n_couples << " couples need " << rim.required * 1e3
        << " mm of rim but " << d.layout.rows << " row(s) give " << rim.capacity * 1e3 << " mm (deficit "
        << rim.deficit * 1e3 << " mm)";
    throw ValidationError(msg.str());
  }
  detail::validate(device_area(d) > d.n_couples * cell_footprint(d.cell),
                   "design: die area > n_couples * cell footprint violated");
}

inline void validate(const Environment& e) {
  detail::validate(e.T_ambient > 0.0 && std::isfinite(e.T_source), "environment: temperatures must be positive");
  detail::validate(e.body_specific_resistance >= 0.0, "environment: body_specific_resistance >= 0 violated");
  detail::validate(e.body_contact_area > 0.0, "environment: body_contact_area > 0 violated");
  detail::validate(e.R_hot_plate >= 0.0 && e.R_cold_plate >= 0.0, "environment: plate resistances >= 0 violated");
  detail::validate(e.radiator_area > 0.0, "environment: radiator_area > 0 violated");
  detail::validate(e.h_natural > 0.0 && e.h_forced > 0.0, "environment: convection coefficients > 0 violated");
  detail::validate(e.emissivity >= 0.0 && e.emissivity <= 1.0, "environment: 0 <= emissivity <= 1 violated");
}

/// n * (S_p - S_n) * dT.
inline double open_circuit_voltage(int n, const CoupleMaterials& pair, double dT) {
  detail::require(n >= 1, "open_circuit_voltage: n must be >= 1");
  return n * pair.seebeck_difference() * dT;
}

inline double matched_load_power(double V_oc, double R_int) {
  detail::require(R_int > 0.0, "matched_load_power: internal resistance must be > 0");
  return V_oc * V_oc / (4.0 * R_int);
}

// Sum of L/(w t) over the segments of one leg, 1/m.
inline double leg_shape_factor(const ThermocoupleGeometry& g) {
  double s = 0.0;
  for (const auto& seg : leg_segments(g)) s += seg.length / (seg.width * seg.thickness);
  return s;
}

/// Electrical resistance of one couple: both legs, two contacts per leg, interconnect.
inline double couple_resistance(const GeneratorDesign& d) {
  const double shape = leg_shape_factor(d.cell.geometry);
  const double area = effective_contact_area(d);
  detail::require(area > 0.0, "internal_resistance: contact area must be > 0");
  const auto& m = d.materials;
  return (m.p.electrical_resistivity + m.n.electrical_resistivity) * shape + 2.0 * contact_resistance(m.p, area) +
         2.0 * contact_resistance(m.n, area) + d.interconnect_resistance;
}

inline double internal_resistance(const GeneratorDesign& d) { return d.n_couples * couple_resistance(d); }

// The two legs of a cell conduct in parallel, so the mean conductivity is
// exact for the analytic model.
inline double leg_conductivity(const CoupleMaterials& m) {
  return 0.5 * (m.p.thermal_conductivity + m.n.thermal_conductivity);
}

inline double design_cell_resistance(const GeneratorDesign& d, const ThermalModel& model) {
  return cell_resistance(d.cell, leg_conductivity(d.materials), model.backend, model.numeric);
}

/// Rim bypass: the etched gap over the die area not covered by couples.
inline double rim_gap_resistance(const GeneratorDesign& d) {
  return gap_resistance(d.layout.etch_depth, device_area(d) - d.n_couples * cell_footprint(d.cell),
                        d.gap_conductivity);
}

inline double radiation_conductance(double emissivity, double area, double T) {
  return 4.0 * emissivity * kStefanBoltzmann * T * T * T * area;
}

inline double sink_resistance(const Environment& e) {
  const double r_conv = convection_resistance(e.forced_convection ? e.h_forced : e.h_natural, e.radiator_area);
  if (!e.radiation || e.emissivity == 0.0) return r_conv;
  return parallel(r_conv, 1.0 / radiation_conductance(e.emissivity, e.radiator_area, e.T_ambient));
}

inline ThermalCircuit build_circuit(const GeneratorDesign& d, const Environment& e, double R_cell) {
  ThermalCircuit c;
  c.T_source = e.T_source;
  c.T_ambient = e.T_ambient;
  c.R_body = e.body_specific_resistance / e.body_contact_area;
  c.R_hot_plate = e.R_hot_plate;
  c.R_cold_plate = e.R_cold_plate;
  c.R_pile = R_cell / d.n_couples;
  c.R_gap = rim_gap_resistance(d);
  c.R_sink = sink_resistance(e);
  return c;
}

/// Junction drop for n couples when Q is forced through the pile/gap block:
/// Q R_gap / (1 + n R_gap / R_cell).
inline double constant_flow_junction_drop(double Q, double R_cell, double R_gap, int n) {
  detail::require(n >= 1 && R_cell > 0.0 && R_gap > 0.0, "constant_flow_junction_drop: n, R_cell, R_gap must be > 0");
  if (std::isinf(R_gap)) return Q * R_cell / n;
  return Q * R_gap / (1.0 + n * R_gap / R_cell);
}

/// Matched-load power over all n at fixed Q, reached at n R_gap = R_cell:
/// dS^2 Q^2 R_gap R_cell / (16 r), r the electrical resistance per couple.
inline double constant_flow_power_ceiling(double seebeck_difference, double Q, double R_gap, double R_cell,
                                          double couple_resistance) {
  return seebeck_difference * seebeck_difference * Q * Q * R_gap * R_cell / (16.0 * couple_resistance);
}

namespace detail {

inline GeneratorReport make_report(const GeneratorDesign& d, const Environment& e, double dT_j, double Q_total,
                                   double Q_pile) {
  GeneratorReport r;
  r.n_couples = d.n_couples;
  r.dT_junctions = dT_j;
  r.Q_total = Q_total;
  r.Q_pile = Q_pile;
  r.V_oc = open_circuit_voltage(d.n_couples, d.materials, dT_j);
  r.R_internal = internal_resistance(d);
  r.P_matched = matched_load_power(r.V_oc, r.R_internal);
  r.device_area = device_area(d);
  const double drive = e.T_source - e.T_ambient;
  r.areal_voltage_density = drive == 0.0 ? 0.0 : r.V_oc / (drive * r.device_area) * units::to_mV_per_K_cm2;
  return r;
}

}  // namespace detail

/// Single pass: cell resistance -> network -> voltage, resistance, power.
/// No Peltier feedback.
inline GeneratorReport simulate(const GeneratorDesign& d, const Environment& e, const SimulationOptions& opts = {}) {
  validate(d);
  validate(e);
  const double R_cell = design_cell_resistance(d, opts.model);
  const double R_gap = rim_gap_resistance(d);
  const double R_pile = R_cell / d.n_couples;
  GeneratorReport r;
  if (opts.mode == FlowMode::Network) {
    const NetworkSolution s = solve_network(build_circuit(d, e, R_cell));
    r = detail::make_report(d, e, s.dT_junctions, s.Q_total, s.Q_pile);
  } else {
    detail::require(opts.heat_flow >= 0.0, "simulate: constant heat flow must be >= 0");
    const double dT = constant_flow_junction_drop(opts.heat_flow, R_cell, R_gap, d.n_couples);
    r = detail::make_report(d, e, dT, opts.heat_flow, dT / R_pile);
  }
  r.mode = opts.mode;
  r.R_cell = R_cell;
  r.R_pile = R_pile;
  r.R_gap = R_gap;
  return r;
}

struct DesignVariant {
  double end_width_a = 0.0;
  double middle_width_b = 0.0;
  std::string type;  // label, e.g. "A"
  int n_couples = 0;
};

struct DesignRow {
  DesignVariant variant;
  GeneratorReport report;
  double power_ceiling = std::numeric_limits<double>::quiet_NaN();
  std::string error;

  bool ok() const { return error.empty(); }
};

/// Mask catalog crossed with the couple-count types, at the catalog step height.
inline std::vector<DesignVariant> design_catalog(const std::vector<MaskType>& masks,
                                                 const std::vector<std::pair<std::string, int>>& types) {
  std::vector<DesignVariant> out;
  for (const auto& m : masks)
    for (const auto& [label, n] : types) out.push_back({m.end_width_a, m.middle_width_b, label, n});
  return out;
}

inline std::vector<DesignRow> sweep_designs(const GeneratorDesign& base, const Environment& e,
                                            const std::vector<DesignVariant>& catalog,
                                            const SimulationOptions& opts = {}, int parallelism = 1) {
  detail::require(!catalog.empty(), "sweep_designs: empty catalog");
  return parallel_map(catalog.size(), parallelism, [&](std::size_t i) {
    DesignRow row;
    row.variant = catalog[i];
    try {
      GeneratorDesign d = base;
      d.cell = with_widths(d.cell, catalog[i].end_width_a, catalog[i].middle_width_b);
      d.n_couples = catalog[i].n_couples;
      row.report = simulate(d, e, opts);
      row.power_ceiling = constant_flow_power_ceiling(d.materials.seebeck_difference(), row.report.Q_total,
                                                      row.report.R_gap, row.report.R_cell, couple_resistance(d));
    } catch (const Error& ex) {
      row.error = ex.what();
    }
    return row;
  });
}

/// Couple count maximizing n * R_block(n)^2 at fixed heat flow, i.e. the
/// matched-load power up to constant factors. Ties go to the smaller n.
inline int best_couple_count(double R_cell, double R_gap, const std::vector<int>& n_values) {
  detail::require(!n_values.empty(), "best_couple_count: empty range");
  detail::require(R_cell > 0.0 && R_gap > 0.0, "best_couple_count: resistances must be > 0");
  int best = 0;
  double best_score = -1.0;
  for (int n : n_values) {
    detail::require(n >= 1, "best_couple_count: n must be >= 1");
    const double drop = constant_flow_junction_drop(1.0, R_cell, R_gap, n);
    const double score = n * drop * drop;
    if (score > best_score || (score == best_score && n < best)) {
      best = n;
      best_score = score;
    }
  }
  return best;
}

struct OptimizePoint {
  int n = 0;
  double R_pile = 0.0;
  double dT_junctions = 0.0;
  double V_oc = 0.0;
  double P_matched = 0.0;
};

struct OptimizeResult {
  int n_best = 0;
  double heat_flow = 0.0;  // W held constant over the sweep
  GeneratorReport report;  // at n_best
  std::vector<OptimizePoint> curve;
};

inline std::vector<int> couple_range(int n_min, int n_max, int step) {
  detail::require(n_min >= 1 && n_max >= n_min && step >= 1, "couple_range: need 1 <= n_min <= n_max, step >= 1");
  std::vector<int> out;
  for (int n = n_min; n <= n_max; n += step) out.push_back(n);
  return out;
}

/// Brute-force search over n at constant heat flow. The flow is taken from
/// the full network at the template's couple count unless given in `opts`;
/// R_cell and R_gap are those of the template.
inline OptimizeResult optimize_couples(const GeneratorDesign& tmpl, const Environment& e,
                                       const std::vector<int>& n_values, const SimulationOptions& opts = {}) {
  detail::require(!n_values.empty(), "optimize_couples: empty range");
  validate(tmpl);
  validate(e);
  const double R_cell = design_cell_resistance(tmpl, opts.model);
  const double R_gap = rim_gap_resistance(tmpl);
  double Q = opts.heat_flow;
  if (opts.mode == FlowMode::Network || Q <= 0.0) Q = solve_network(build_circuit(tmpl, e, R_cell)).Q_total;

  const double r = couple_resistance(tmpl);
  OptimizeResult out;
  out.heat_flow = Q;
  double best_p = -1.0;
  for (int n : n_values) {
    detail::require(n >= 1, "optimize_couples: n must be >= 1");
    OptimizePoint pt;
    pt.n = n;
    pt.R_pile = R_cell / n;
    pt.dT_junctions = constant_flow_junction_drop(Q, R_cell, R_gap, n);
    pt.V_oc = open_circuit_voltage(n, tmpl.materials, pt.dT_junctions);
    pt.P_matched = matched_load_power(pt.V_oc, n * r);
    if (pt.P_matched > best_p || (pt.P_matched == best_p && n < out.n_best)) {
      best_p = pt.P_matched;
      out.n_best = n;
    }
    out.curve.push_back(pt);
  }
  GeneratorDesign best = tmpl;
  best.n_couples = out.n_best;
  const double dT = constant_flow_junction_drop(Q, R_cell, R_gap, out.n_best);
  out.report = detail::make_report(best, e, dT, Q, dT / (R_cell / out.n_best));
  out.report.mode = FlowMode::ConstantFlow;
  out.report.R_cell = R_cell;
  out.report.R_pile = R_cell / out.n_best;
  out.report.R_gap = R_gap;
  return out;
}

// Probe-station measurement: the bottom chip sits on a temperature-controlled
// chuck, the bare top die acts as radiator. The unreleased cell is filled with
// sacrificial oxide; the inter-chip gap outside the pile is gas either way.
struct ChuckScenario {
  double test_die_side = 7.5e-3;
  double T_chuck = 313.15;
  double T_ambient = 295.15;
  double h_natural = 10.0;
  double h_forced = 50.0;
  double k_unreleased = kTeosConductivity;
  double k_released = kAirConductivity;
  double k_gap = kAirConductivity;

  friend bool operator==(const ChuckScenario&, const ChuckScenario&) = default;
};

struct ChuckResult {
  bool rim = false, forced = false, released = false;
  double density = 0.0;  // mV/(K cm^2)
  double V_oc = 0.0;
  double dT_junctions = 0.0;
  double Q_total = 0.0;
  double R_cell = 0.0;
  double R_pile = 0.0;
  double R_gap = 0.0;
  double R_sink = 0.0;
};

inline void validate(const ChuckScenario& s) {
  detail::validate(s.test_die_side > 0.0, "scenario: test_die_side > 0 violated");
  detail::validate(s.T_ambient > 0.0 && s.T_chuck != s.T_ambient, "scenario: T_chuck != T_ambient > 0 violated");
  detail::validate(s.h_natural > 0.0 && s.h_forced > 0.0, "scenario: convection coefficients > 0 violated");
  detail::validate(s.k_unreleased > 0.0 && s.k_released > 0.0 && s.k_gap > 0.0,
                   "scenario: fill conductivities > 0 violated");
}

/// Open-circuit voltage per kelvin of chuck-ambient difference per unit test
/// die area. Without the rim the bypass spans the cell gap height; with it,
/// the etch depth.
inline ChuckResult chuck_scenario(const GeneratorDesign& d, const ChuckScenario& s, bool rim, bool forced,
                                  bool released, const ThermalModel& model = {}) {
  validate(s);
  GeneratorDesign test = d;
  test.layout.die_side = s.test_die_side;
  test.cell.fill_conductivity = released ? s.k_released : s.k_unreleased;
  validate(test);

  ChuckResult r;
  r.rim = rim;
  r.forced = forced;
  r.released = released;
  const double area = device_area(test);
  r.R_cell = design_cell_resistance(test, model);
  r.R_pile = r.R_cell / test.n_couples;
  const double free_area = area - test.n_couples * cell_footprint(test.cell);
  r.R_gap = gap_resistance(rim ? test.layout.etch_depth : d.cell.gap_height, free_area, s.k_gap);
  r.R_sink = convection_resistance(forced ? s.h_forced : s.h_natural, area);

  ThermalCircuit c;
  c.T_source = s.T_chuck;
  c.T_ambient = s.T_ambient;
  c.R_pile = r.R_pile;
  c.R_gap = r.R_gap;
  c.R_sink = r.R_sink;
  const NetworkSolution sol = solve_network(c);
  r.Q_total = sol.Q_total;
  r.dT_junctions = sol.dT_junctions;
  r.V_oc = open_circuit_voltage(test.n_couples, test.materials, sol.dT_junctions);
  r.density = r.V_oc / ((s.T_chuck - s.T_ambient) * area) * units::to_mV_per_K_cm2;
  return r;
}

}  // namespace tegsim

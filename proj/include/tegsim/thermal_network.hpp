#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "tegsim/error.hpp"

namespace tegsim {

// Series chain source -> body -> hot plate -> (pile || gap) -> cold plate ->
// sink -> ambient. Resistances in K/W; +inf marks an open branch.
struct ThermalCircuit {
  double T_source = 310.15;  // K
  double T_ambient = 295.15;
  double R_body = 0.0;
  double R_hot_plate = 0.0;
  double R_cold_plate = 0.0;
  double R_pile = std::numeric_limits<double>::infinity();
  double R_gap = std::numeric_limits<double>::infinity();
  double R_sink = 0.0;
};

struct NetworkSolution {
  double Q_total = 0.0;  // W
  double Q_pile = 0.0;
  double Q_gap = 0.0;
  double dT_junctions = 0.0;  // K across the parallel block
  // Node temperatures along the chain.
  double T_source = 0.0;
  double T_skin = 0.0;        // body / hot plate interface
  double T_hot = 0.0;         // hot side of the pile
  double T_cold = 0.0;        // cold side of the pile
  double T_radiator = 0.0;    // cold plate / sink interface
  double T_ambient = 0.0;
};

/// Conduction through a fill layer: gap / (k * area).
inline double gap_resistance(double gap, double area, double k_fill) {
  detail::require(gap > 0.0 && area > 0.0 && k_fill > 0.0, "gap_resistance: gap, area and k must be > 0");
  return gap / (k_fill * area);
}

/// 1 / (h * area).
inline double convection_resistance(double h_coeff, double area) {
  detail::require(h_coeff > 0.0 && area > 0.0, "convection_resistance: h and area must be > 0");
  return 1.0 / (h_coeff * area);
}

/// Area fraction at which equal-height columns of thermoelectric material and
/// fill have equal resistance: k_fill / k_material, capped at 1.
inline double matched_fill_fraction(double k_material, double k_fill) {
  detail::require(k_material > 0.0 && k_fill > 0.0, "matched_fill_fraction: conductivities must be > 0");
  return std::min(k_fill / k_material, 1.0);
}

/// a || b with 0 shorting and +inf opening the branch.
inline double parallel(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  if (std::isinf(a)) return b;
  if (std::isinf(b)) return a;
  return a * b / (a + b);
}

inline void validate(const ThermalCircuit& c) {
  for (double r : {c.R_body, c.R_hot_plate, c.R_cold_plate, c.R_pile, c.R_gap, c.R_sink})
    detail::validate(r >= 0.0, "circuit: all resistances >= 0 violated");
  detail::validate(c.R_pile > 0.0 || c.R_gap > 0.0, "circuit: R_pile > 0 or R_gap > 0 violated");
  detail::validate(std::isfinite(c.T_source) && std::isfinite(c.T_ambient) && c.T_ambient > 0.0,
                   "circuit: temperatures must be finite and positive");
}

inline NetworkSolution solve_network(const ThermalCircuit& c) {
  validate(c);
  const double r_block = parallel(c.R_pile, c.R_gap);
  const double r_total = c.R_body + c.R_hot_plate + r_block + c.R_cold_plate + c.R_sink;
  if (r_total == 0.0) throw SingularCircuit("solve_network: total resistance is zero");

  NetworkSolution s;
  s.T_source = c.T_source;
  s.T_ambient = c.T_ambient;
  s.Q_total = std::isinf(r_total) ? 0.0 : (c.T_source - c.T_ambient) / r_total;
  s.dT_junctions = s.Q_total * r_block;
  if (c.R_pile == 0.0) {
    s.Q_pile = s.Q_total;
  } else if (c.R_gap == 0.0 || std::isinf(c.R_pile)) {
    s.Q_pile = 0.0;
  } else {
    s.Q_pile = s.dT_junctions / c.R_pile;
  }
  s.Q_gap = s.Q_total - s.Q_pile;

  s.T_skin = s.T_source - s.Q_total * c.R_body;
  s.T_hot = s.T_skin - s.Q_total * c.R_hot_plate;
  s.T_cold = s.T_hot - s.dT_junctions;
  s.T_radiator = s.T_cold - s.Q_total * c.R_cold_plate;
  return s;
}

/// Drop across the parallel block when a fixed heat flow is forced through it.
inline double block_drop_at_constant_flow(double Q, double R_pile, double R_gap) {
  return Q * parallel(R_pile, R_gap);
}

}  // namespace tegsim

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tegsim/config.hpp"
#include "tegsim/csv.hpp"
#include "tegsim/error.hpp"
#include "tegsim/fit.hpp"
#include "tegsim/generator.hpp"
#include "tegsim/leg_thermal.hpp"
#include "tegsim/materials.hpp"
#include "tegsim/thermal_network.hpp"

namespace tegsim::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kSolver = 3,
  kValidation = 4,
  kResource = 5,
};

inline constexpr double kZtDiscrepancyThreshold = 0.15;

namespace detail {

inline std::string line(const char* format, ...) __attribute__((format(printf, 1, 2)));
inline std::string line(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return std::string(buf) + "\n";
}

inline double to_um(double m) { return m / units::um; }

inline Table quantity_table(const std::string& name) {
  Table t;
  t.name = name;
  t.columns = {"quantity", "value", "unit"};
  return t;
}

struct Context {
  const ResolvedConfig& cfg;
  std::string command;
  std::ostream& out;
  std::ostream& err;

  SweepOptions sweep_options() const {
    SweepOptions o;
    o.backend = cfg.solver.backend;
    o.numeric = cfg.solver.numeric;
    o.parallelism = cfg.solver.parallelism;
    return o;
  }

  double k_leg() const { return leg_conductivity(cfg.design.materials); }

  // Writes the table in the configured format and reports the path.
  void emit(const Table& t) const {
    const bool plot = cfg.output.format == "plot";
    if (plot && (t.plot_x < 0 || t.plot_y < 0))
      throw ConfigError("output.format: plot output is only available for sweep subcommands, not '" + command + "'");
    const std::filesystem::path dir(cfg.output.directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("output.directory: cannot create '" + dir.string() + "': " + ec.message());
    const auto path = dir / (t.name + (plot ? ".dat" : ".csv"));
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("output.directory: cannot write '" + path.string() + "'");
    if (plot) {
      write_plot(f, t);
    } else {
      write_csv(f, t, {command, config_hash(cfg), physics_document(cfg).dump(), cfg.output.timestamp});
    }
    f.close();
    if (!f) throw ConfigError("output.directory: write failed for '" + path.string() + "'");
    out << "wrote " << path.string() << "\n";
  }
};

// --- materials -------------------------------------------------------------

inline void materials_zt(const Context& ctx) {
  const auto& m = ctx.cfg.design.materials;
  const double T = ctx.cfg.room_temperature;
  Table t;
  t.name = "materials_zt";
  t.columns = {"material", "temperature_K", "zt_formula", "zt_reported", "relative_difference"};
  t.notes.push_back("zt_formula = S^2 T / (rho k); couple uses (S_p - S_n)^2 / (sqrt(rho_p k_p) + sqrt(rho_n k_n))^2");

  ctx.out << line("Figure of merit at %.2f K, ZT = S^2 T / (rho k)", T);
  struct Entry {
    const char* label;
    double formula;
    double reported;
  };
  const Entry entries[] = {{"p-type", figure_of_merit(m.p, T), kReportedZtP},
                           {"n-type", figure_of_merit(m.n, T), kReportedZtN},
                           {"couple", couple_figure_of_merit(m, T), std::nan("")}};
  for (const auto& e : entries) {
    if (std::isnan(e.reported)) {
      ctx.out << line("  %-7s formula %.4f", e.label, e.formula);
      t.add({e.label, fmt(T), fmt(e.formula), "", ""});
      continue;
    }
    const double rel = (e.formula - e.reported) / e.reported;
    ctx.out << line("  %-7s formula %.4f   reported %.3f   difference %+.1f%%", e.label, e.formula, e.reported,
                    100.0 * rel);
    if (std::abs(rel) > kZtDiscrepancyThreshold) {
      ctx.out << line("          DISCREPANCY: the reported %s value does not follow from the quoted S, rho, k;",
                      e.label);
      ctx.out << "          the formula value is reported as computed.\n";
      t.notes.push_back(std::string("discrepancy: ") + e.label + " formula " + fmt(e.formula) + " vs reported " +
                        fmt(e.reported));
    }
    t.add({e.label, fmt(T), fmt(e.formula), fmt(e.reported), fmt(rel)});
  }
  ctx.emit(t);
}

// --- leg -------------------------------------------------------------------

inline void leg_resistance_cmd(const Context& ctx) {
  const auto& cell = ctx.cfg.design.cell;
  const CellResistance a = analytic_cell_resistance(cell, ctx.k_leg());
  Table t = quantity_table("leg_resistance");
  ctx.out << "Unit cell thermal resistance\n";
  ctx.out << line("  analytic  legs %.6g K/W  fill %.6g K/W  total %.6g K/W", a.legs, a.fill, a.total);
  if (!a.note.empty()) ctx.out << "  note: " << a.note << "\n";
  t.add({"analytic_legs", fmt(a.legs), "K/W"});
  t.add({"analytic_fill", fmt(a.fill), "K/W"});
  t.add({"analytic_total", fmt(a.total), "K/W"});
  if (ctx.cfg.solver.backend == Backend::Numeric) {
    const NumericResistance n = cell_resistance_numeric(cell, ctx.k_leg(), ctx.cfg.solver.numeric);
    ctx.out << line("  numeric   total %.6g K/W  (%zu voxels, %d iterations, residual %.2e, energy imbalance %.2e)",
                    n.resistance, n.voxels, n.iterations, n.residual, n.energy_imbalance);
    ctx.out << line("  numeric / analytic = %.4f", n.resistance / a.total);
    t.add({"numeric_total", fmt(n.resistance), "K/W"});
    t.add({"numeric_voxels", std::to_string(n.voxels), "1"});
    t.add({"numeric_iterations", fmt(n.iterations), "1"});
    t.add({"numeric_residual", fmt(n.residual), "1"});
    t.add({"numeric_energy_imbalance", fmt(n.energy_imbalance), "1"});
  }
  ctx.emit(t);
}

inline void print_rows(const Context& ctx, const char* label, const std::vector<double>& x,
                       const std::vector<SweepRow>& rows) {
  ctx.out << line("  %8s  %14s", label, "R [K/W]");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].ok())
      ctx.out << line("  %8.3f  %14.6g", x[i], rows[i].resistance);
    else
      ctx.out << line("  %8.3f  %14s  %s", x[i], "failed", rows[i].error.c_str());
  }
}

inline void leg_sweep_1d(const Context& ctx, bool width) {
  const auto& cfg = ctx.cfg;
  const auto& values = width ? cfg.sweep.b_values : cfg.sweep.h_values;
  const auto rows = width ? sweep_width(cfg.design.cell, ctx.k_leg(), values, ctx.sweep_options())
                          : sweep_height(cfg.design.cell, ctx.k_leg(), values, ctx.sweep_options());
  const char* col = width ? "b_um" : "h_um";
  Table t;
  t.name = width ? "leg_sweep_width" : "leg_sweep_height";
  t.columns = {col, "R_K_per_W", "error"};
  t.plot_x = 0;
  t.plot_y = 1;
  t.notes.push_back(std::string("backend: ") + to_string(cfg.solver.backend));
  std::vector<double> x_um, fx, fy;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x_um.push_back(to_um(values[i]));
    t.add({fmt(x_um.back()), fmt(rows[i].resistance), rows[i].error});
    if (rows[i].ok()) {
      fx.push_back(x_um.back());
      fy.push_back(rows[i].resistance);
    }
  }
  ctx.out << (width ? "Cell resistance vs middle width b" : "Cell resistance vs step height h") << " ("
          << to_string(cfg.solver.backend) << ")\n";
  print_rows(ctx, width ? "b [um]" : "h [um]", x_um, rows);
  if (fx.size() >= 2) {
    const auto [first, last] = std::pair{fy.front(), fy.back()};
    ctx.out << line("  R(first) / R(last) = %.4f", first / last);
    if (!width) {
      const LinearFit fit = linear_fit(fx, fy);
      ctx.out << line("  linear fit: slope %.6g K/W per um, intercept %.6g K/W, R^2 %.5f", fit.slope, fit.intercept,
                      fit.r_squared);
      t.notes.push_back("linear fit: slope " + fmt(fit.slope) + " K/W/um, intercept " + fmt(fit.intercept) +
                        " K/W, r_squared " + fmt(fit.r_squared));
    }
  }
  ctx.emit(t);
}

inline void leg_sweep_mask(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto rows = sweep_mask_types(cfg.design.cell, ctx.k_leg(), cfg.sweep.mask_catalog, ctx.sweep_options(),
                                     cfg.sweep.mask_step_height);
  Table t;
  t.name = "leg_sweep_mask";
  t.columns = {"a_um", "b_um", "h_um", "R_K_per_W", "error"};
  t.notes.push_back(std::string("backend: ") + to_string(cfg.solver.backend));
  ctx.out << line("Mask thermocouple types at h = %.3f um (%s)", to_um(cfg.sweep.mask_step_height),
                  to_string(cfg.solver.backend));
  ctx.out << line("  %8s  %8s  %14s", "a [um]", "b [um]", "R [K/W]");
  for (const auto& r : rows) {
    t.add({fmt(to_um(r.end_width_a)), fmt(to_um(r.middle_width_b)), fmt(to_um(r.step_height_h)), fmt(r.resistance),
           r.error});
    if (r.ok())
      ctx.out << line("  %8.3f  %8.3f  %14.6g", to_um(r.end_width_a), to_um(r.middle_width_b), r.resistance);
    else
      ctx.out << line("  %8.3f  %8.3f  %14s  %s", to_um(r.end_width_a), to_um(r.middle_width_b), "failed",
                      r.error.c_str());
  }
  ctx.emit(t);
}

// --- network ---------------------------------------------------------------

inline void network_solve(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  validate(cfg.design);
  const double R_cell = design_cell_resistance(cfg.design, cfg.simulation().model);
  const ThermalCircuit c = build_circuit(cfg.design, cfg.environment, R_cell);
  const NetworkSolution s = solve_network(c);
  Table t = quantity_table("network_solve");
  struct Item {
    const char* name;
    double value;
    const char* unit;
  };
  const Item items[] = {
      {"R_body", c.R_body, "K/W"},
      {"R_hot_plate", c.R_hot_plate, "K/W"},
      {"R_pile", c.R_pile, "K/W"},
      {"R_gap", c.R_gap, "K/W"},
      {"R_cold_plate", c.R_cold_plate, "K/W"},
      {"R_sink", c.R_sink, "K/W"},
      {"Q_total", s.Q_total, "W"},
      {"Q_pile", s.Q_pile, "W"},
      {"Q_gap", s.Q_gap, "W"},
      {"dT_junctions", s.dT_junctions, "K"},
      {"T_source", s.T_source, "K"},
      {"T_skin", s.T_skin, "K"},
      {"T_hot", s.T_hot, "K"},
      {"T_cold", s.T_cold, "K"},
      {"T_radiator", s.T_radiator, "K"},
      {"T_ambient", s.T_ambient, "K"},
  };
  ctx.out << line("Thermal network, %d couples, R_cell %.6g K/W (%s)", cfg.design.n_couples, R_cell,
                  to_string(cfg.solver.backend));
  for (const auto& it : items) {
    ctx.out << line("  %-14s %14.6g %s", it.name, it.value, it.unit);
    t.add({it.name, fmt(it.value), it.unit});
  }
  ctx.emit(t);
}

// --- generator -------------------------------------------------------------

inline SimulationOptions resolved_simulation(const ResolvedConfig& cfg) {
  SimulationOptions o = cfg.simulation();
  if (o.mode == FlowMode::ConstantFlow && o.heat_flow <= 0.0) {
    validate(cfg.design);
    const double R_cell = design_cell_resistance(cfg.design, o.model);
    o.heat_flow = solve_network(build_circuit(cfg.design, cfg.environment, R_cell)).Q_total;
  }
  return o;
}

inline void add_report(Table& t, const GeneratorReport& r) {
  t.add({"n_couples", fmt(r.n_couples), "1"});
  t.add({"mode", to_string(r.mode), ""});
  t.add({"R_cell", fmt(r.R_cell), "K/W"});
  t.add({"R_pile", fmt(r.R_pile), "K/W"});
  t.add({"R_gap", fmt(r.R_gap), "K/W"});
  t.add({"Q_total", fmt(r.Q_total), "W"});
  t.add({"Q_pile", fmt(r.Q_pile), "W"});
  t.add({"dT_junctions", fmt(r.dT_junctions), "K"});
  t.add({"V_oc", fmt(r.V_oc), "V"});
  t.add({"R_internal", fmt(r.R_internal), "Ohm"});
  t.add({"P_matched", fmt(r.P_matched), "W"});
  t.add({"device_area", fmt(r.device_area / units::cm2), "cm2"});
  t.add({"areal_voltage_density", fmt(r.areal_voltage_density), "mV/(K cm2)"});
}

inline void print_report(const Context& ctx, const GeneratorReport& r) {
  ctx.out << line("  couples              %d", r.n_couples);
  ctx.out << line("  R_cell / R_pile      %.6g / %.6g K/W", r.R_cell, r.R_pile);
  ctx.out << line("  R_gap                %.6g K/W", r.R_gap);
  ctx.out << line("  Q_total / Q_pile     %.6g / %.6g mW", r.Q_total * 1e3, r.Q_pile * 1e3);
  ctx.out << line("  junction dT          %.6g K", r.dT_junctions);
  ctx.out << line("  open-circuit V       %.6g V", r.V_oc);
  ctx.out << line("  internal R           %.6g kOhm", r.R_internal / 1e3);
  ctx.out << line("  matched-load P       %.6g uW", r.P_matched * 1e6);
  ctx.out << line("  voltage density      %.6g mV/(K cm^2) over %.4g cm^2", r.areal_voltage_density,
                  r.device_area / units::cm2);
}

inline void gen_simulate(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const GeneratorReport r = simulate(cfg.design, cfg.environment, resolved_simulation(cfg));
  ctx.out << line("Generator, %s mode (%s cell model)", to_string(r.mode), to_string(cfg.solver.backend));
  print_report(ctx, r);
  Table t = quantity_table("gen_simulate");
  add_report(t, r);
  ctx.emit(t);
}

inline void gen_sweep(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  GeneratorDesign base = cfg.design;
  base.cell = with_step_height(base.cell, cfg.sweep.mask_step_height);
  const auto catalog = design_catalog(cfg.sweep.mask_catalog,
                                      {{"A", cfg.design.n_couples}, {"B", cfg.generator.n_couples_type_b}});
  const auto rows = sweep_designs(base, cfg.environment, catalog, resolved_simulation(cfg), cfg.solver.parallelism);
  Table t;
  t.name = "gen_sweep";
  t.columns = {"a_um",   "b_um",     "type",       "n_couples",  "R_cell_K_per_W", "dT_junctions_K",
               "Q_total_W", "V_oc_V", "R_internal_Ohm", "P_matched_W", "P_ceiling_W",    "error"};
  ctx.out << line("Design sweep at h = %.3f um, %s mode", to_um(cfg.sweep.mask_step_height),
                  to_string(cfg.generator.mode));
  ctx.out << line("  %6s %6s %4s %6s %10s %8s %8s %10s %10s", "a[um]", "b[um]", "type", "n", "R_cell", "dT[K]",
                  "V_oc[V]", "R_int[kO]", "P[uW]");
  for (const auto& row : rows) {
    const auto& v = row.variant;
    const auto& r = row.report;
    if (!row.ok()) {
      t.add({fmt(to_um(v.end_width_a)), fmt(to_um(v.middle_width_b)), v.type, fmt(v.n_couples), "nan", "nan", "nan",
             "nan", "nan", "nan", "nan", row.error});
      ctx.out << line("  %6.2f %6.2f %4s %6d  failed: %s", to_um(v.end_width_a), to_um(v.middle_width_b),
                      v.type.c_str(), v.n_couples, row.error.c_str());
      continue;
    }
    t.add({fmt(to_um(v.end_width_a)), fmt(to_um(v.middle_width_b)), v.type, fmt(v.n_couples), fmt(r.R_cell),
           fmt(r.dT_junctions), fmt(r.Q_total), fmt(r.V_oc), fmt(r.R_internal), fmt(r.P_matched),
           fmt(row.power_ceiling), ""});
    ctx.out << line("  %6.2f %6.2f %4s %6d %10.4g %8.4f %8.4f %10.4g %10.4g", to_um(v.end_width_a),
                    to_um(v.middle_width_b), v.type.c_str(), v.n_couples, r.R_cell, r.dT_junctions, r.V_oc,
                    r.R_internal / 1e3, r.P_matched * 1e6);
  }
  ctx.emit(t);
}

inline void gen_optimize(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& g = cfg.generator;
  SimulationOptions o = cfg.simulation();
  const auto res = optimize_couples(cfg.design, cfg.environment,
                                    couple_range(g.optimize_n_min, g.optimize_n_max, g.optimize_n_step), o);
  const auto& r = res.report;
  Table t;
  t.name = "gen_optimize";
  t.columns = {"n_couples", "R_pile_K_per_W", "dT_junctions_K", "V_oc_V", "P_matched_W"};
  t.plot_x = 0;
  t.plot_y = 4;
  t.notes.push_back("constant heat flow " + fmt(res.heat_flow) + " W; best n " + std::to_string(res.n_best));
  for (const auto& p : res.curve)
    t.add({fmt(p.n), fmt(p.R_pile), fmt(p.dT_junctions), fmt(p.V_oc), fmt(p.P_matched)});
  ctx.out << line("Couple-count optimum at constant heat flow %.6g mW, n in [%d, %d] step %d", res.heat_flow * 1e3,
                  g.optimize_n_min, g.optimize_n_max, g.optimize_n_step);
  ctx.out << line("  best n               %d", res.n_best);
  ctx.out << line("  R_cell / n           %.6g K/W vs R_gap %.6g K/W (mismatch %+.2f%%)", r.R_pile, r.R_gap,
                  100.0 * (r.R_pile - r.R_gap) / r.R_gap);
  ctx.out << line("  R_cell / R_gap       %.6g", r.R_cell / r.R_gap);
  print_report(ctx, r);
  ctx.emit(t);
}

// --- scenario --------------------------------------------------------------

inline void scenario_chuck(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ThermalModel model{cfg.solver.backend, cfg.solver.numeric};
  Table t;
  t.name = "scenario_chuck";
  t.columns = {"rim",      "forced_convection", "released",     "density_mV_per_K_cm2", "V_oc_V",
               "dT_junctions_K", "Q_total_W", "R_pile_K_per_W", "R_gap_K_per_W", "R_sink_K_per_W"};
  t.notes.push_back("absolute densities depend on the assumed test die; the rim/no-rim ratios are the comparison target");
  ChuckResult results[2][2][2];
  for (int released = 0; released < 2; ++released)
    for (int forced = 0; forced < 2; ++forced)
      for (int rim = 0; rim < 2; ++rim) {
        const ChuckResult r = chuck_scenario(cfg.design, cfg.scenario, rim, forced, released, model);
        results[released][forced][rim] = r;
        t.add({rim ? "1" : "0", forced ? "1" : "0", released ? "1" : "0", fmt(r.density), fmt(r.V_oc),
               fmt(r.dT_junctions), fmt(r.Q_total), fmt(r.R_pile), fmt(r.R_gap), fmt(r.R_sink)});
      }
  ctx.out << line("Chuck measurement scenario, %d couples on a %.3g mm test die, chuck %.2f C, ambient %.2f C",
                  cfg.design.n_couples, cfg.scenario.test_die_side * 1e3,
                  units::kelvin_to_celsius(cfg.scenario.T_chuck), units::kelvin_to_celsius(cfg.scenario.T_ambient));
  ctx.out << line("  %-10s %-8s %16s %16s %10s", "fill", "cooling", "no rim", "rim", "ratio");
  for (int released = 0; released < 2; ++released)
    for (int forced = 1; forced >= 0; --forced) {
      const double no_rim = results[released][forced][0].density;
      const double rim = results[released][forced][1].density;
      ctx.out << line("  %-10s %-8s %16.6g %16.6g %10.4f", released ? "released" : "oxide",
                      forced ? "forced" : "natural", no_rim, rim, rim / no_rim);
      t.notes.push_back(std::string("ratio rim/no-rim ") + (released ? "released " : "unreleased ") +
                        (forced ? "forced" : "natural") + ": " + fmt(rim / no_rim));
    }
  ctx.out << "  densities in mV/(K cm^2); absolute values depend on the assumed test die, compare ratios\n";
  ctx.emit(t);
}

}  // namespace detail

/// Entry point shared by the executable and the tests; `args` excludes the
/// program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design and simulation toolkit for micromachined thermoelectric generators", "tegsim"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string format;
  double resolution = 0.0;
  bool no_timestamp = false;
  app.add_option("--config", config_path, std::string("Config file (default: $") + kConfigEnvVar + ")");
  app.add_option("--set", sets, "Override a config key, key=value (repeatable)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "plot"}));
  app.add_option("--resolution", resolution, "Voxels per micrometer for the numeric backend")
      ->check(CLI::PositiveNumber);
  app.add_flag("--no-timestamp", no_timestamp, "Omit the timestamp comment line from CSV output");

  std::function<void(const detail::Context&)> action;
  std::string command;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                  std::function<void(const detail::Context&)> fn) {
    auto* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&, fn, name, parent] {
      action = fn;
      command = parent->get_name() + " " + name;
    });
  };
  auto group = [&](const std::string& name, const std::string& help) {
    auto* g = app.add_subcommand(name, help);
    g->fallthrough();
    g->require_subcommand(1);
    return g;
  };

  auto* materials = group("materials", "Material constants");
  leaf(materials, "zt", "Figures of merit from the configured constants", detail::materials_zt);
  auto* leg = group("leg", "Unit-cell thermal resistance");
  leaf(leg, "resistance", "Resistance of the configured cell", detail::leg_resistance_cmd);
  leaf(leg, "sweep-width", "Resistance over the middle widths in sweep.b_values_um",
       [](const detail::Context& c) { detail::leg_sweep_1d(c, true); });
  leaf(leg, "sweep-height", "Resistance over the step heights in sweep.h_values_um",
       [](const detail::Context& c) { detail::leg_sweep_1d(c, false); });
  leaf(leg, "sweep-mask", "Resistance of every mask type", detail::leg_sweep_mask);
  auto* network = group("network", "Lumped thermal circuit");
  leaf(network, "solve", "Solve the body-device-ambient circuit", detail::network_solve);
  auto* gen = group("gen", "Generator output");
  leaf(gen, "simulate", "Voltage, resistance and power of the configured design", detail::gen_simulate);
  leaf(gen, "sweep", "All mask types for both couple counts", detail::gen_sweep);
  leaf(gen, "optimize", "Couple count maximizing power at constant heat flow", detail::gen_optimize);
  auto* scenario = group("scenario", "Measurement scenarios");
  leaf(scenario, "chuck", "Rim, convection and release effects on a probe chuck", detail::scenario_chuck);
  auto* config = group("config", "Configuration");
  bool show_config = false;
  config->add_subcommand("show", "Print the resolved configuration")->fallthrough()->callback([&] {
    show_config = true;
    command = "config show";
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "tegsim: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    ConfigSources src;
    const std::string reference = default_reference_path();
    if (!reference.empty() && std::filesystem::exists(reference)) src.reference_path = reference;
    if (!config_path.empty()) {
      src.user_path = config_path;
    } else if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
      src.user_path = env;
    }
    src.overrides = sets;
    if (!out_dir.empty()) src.typed_overrides.emplace_back("output.directory", out_dir);
    if (!format.empty()) src.typed_overrides.emplace_back("output.format", format);
    if (resolution > 0.0) src.typed_overrides.emplace_back("solver.resolution_per_um", resolution);
    if (no_timestamp) src.typed_overrides.emplace_back("output.timestamp", false);
    const ResolvedConfig cfg = load_config(src);

    if (show_config) {
      out << dump_config(cfg);
      return kOk;
    }
    action(detail::Context{cfg, command, out, err});
    return kOk;
  } catch (const ConfigError& e) {
    err << "tegsim: config error: " << e.what() << "\n";
    return kConfig;
  } catch (const SolverError& e) {
    err << "tegsim: solver did not converge: " << e.what() << "\n";
    const auto& h = e.residual_history();
    if (!h.empty()) err << "  residual history: first " << h.front() << ", last " << h.back() << " (" << h.size()
                        << " iterations)\n";
    return kSolver;
  } catch (const ResourceError& e) {
    err << "tegsim: resource limit: " << e.what() << "\n";
    err << "  suggested: --resolution " << e.suggested_resolution() << "\n";
    return kResource;
  } catch (const ValidationError& e) {
    err << "tegsim: validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const InvalidInput& e) {
    err << "tegsim: invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const SingularCircuit& e) {
    err << "tegsim: singular circuit: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "tegsim: error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace tegsim::cli

// Acceptance checks, one line per criterion. Tolerances are fixed here.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "tegsim/cli.hpp"
#include "tegsim/config.hpp"
#include "tegsim/fit.hpp"
#include "tegsim/generator.hpp"
#include "tegsim/heat_solver.hpp"
#include "tegsim/leg_thermal.hpp"
#include "tegsim/materials.hpp"
#include "tegsim/thermal_network.hpp"
#include "tegsim/voxel.hpp"

using namespace tegsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += (cond ? "" : "FAILED ") + what;
  }
};

std::string num(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tegsim_acceptance_" + std::to_string(::getpid())) / name;
  fs::create_directories(dir);
  return dir;
}

const ResolvedConfig& reference() {
  static const ResolvedConfig cfg = [] {
    ConfigSources src;
    src.reference_path = default_reference_path();
    return load_config(src);
  }();
  return cfg;
}

// 1: ZT from the film constants.
Outcome figure_of_merit_check() {
  Outcome o;
  const auto& m = reference().design.materials;
  for (double T : {293.0, 300.0}) {
    const double zt = figure_of_merit(m.n, T);
    o.require(std::abs(zt / kReportedZtN - 1.0) <= 0.15, "n ZT(" + num("%.0f", T) + ") " + num("%.4f", zt));
  }
  const double zp = figure_of_merit(m.p, 300.0);
  o.require(std::abs(zp - 0.045) < 0.002, "p ZT " + num("%.4f", zp) + " vs reported " + num("%.3f", kReportedZtP));
  std::string out;
  const int code = run_cli({"materials", "zt", "--out", scratch("zt").string(), "--no-timestamp"}, &out);
  o.require(code == 0 && out.find("DISCREPANCY") != std::string::npos, "p-type discrepancy reported");
  return o;
}

// 2: width endpoints, analytic and numeric.
Outcome width_endpoints() {
  Outcome o;
  const auto& cfg = reference();
  const double k = leg_conductivity(cfg.design.materials);
  const struct {
    double b, target;
  } points[] = {{0.5e-6, 2.58e5}, {4e-6, 1.29e5}};
  for (const auto& p : points) {
    const UnitCell c = with_middle_width(cfg.design.cell, p.b);
    const double ra = analytic_cell_resistance(c, k).total;
    const double rn = cell_resistance_numeric(c, k, cfg.solver.numeric).resistance;
    o.require(std::abs(ra / p.target - 1.0) <= 0.10, "analytic R(b=" + num("%.1f", p.b * 1e6) + ") " + num("%.4g", ra));
    o.require(std::abs(rn / ra - 1.0) <= 0.10, "numeric/analytic " + num("%.4f", rn / ra));
  }
  return o;
}

// 3: linearity in the step height for both backends.
Outcome height_linearity() {
  Outcome o;
  const auto& cfg = reference();
  const double k = leg_conductivity(cfg.design.materials);
  UnitCell cell = with_widths(cfg.design.cell, 10e-6, 3e-6);
  const std::vector<double> hs = {0.5e-6, 1e-6, 1.5e-6, 2e-6, 2.5e-6, 3e-6};
  for (Backend b : {Backend::Analytic, Backend::Numeric}) {
    SweepOptions opts;
    opts.backend = b;
    opts.numeric = cfg.solver.numeric;
    const auto rows = sweep_height(cell, k, hs, opts);
    std::vector<double> r;
    bool all_ok = true;
    for (const auto& row : rows) {
      all_ok = all_ok && row.ok();
      r.push_back(row.resistance);
    }
    const LinearFit fit = linear_fit(hs, r);
    o.require(all_ok && fit.r_squared >= 0.99 && fit.slope > 0.0,
              std::string(to_string(b)) + " R^2 " + num("%.5f", fit.r_squared));
  }
  return o;
}

// 4: matched fill fraction.
Outcome fill_fraction() {
  Outcome o;
  const double f = matched_fill_fraction(3.0, 0.026);
  o.require(f >= 0.008 && f <= 0.010, "fraction " + num("%.5f", f));
  return o;
}

// 5: brute-force power maximum sits at R_cell / n = R_gap.
Outcome matching_optimum() {
  Outcome o;
  std::mt19937 rng(20261016);
  std::uniform_real_distribution<double> log_cell(4.0, 6.0), log_gap(0.5, 2.5);
  const auto range = couple_range(1, 60000, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const double R_cell = std::pow(10.0, log_cell(rng));
    const double R_gap = std::pow(10.0, log_gap(rng));
    if (R_cell / R_gap > 50000.0 || R_cell / R_gap < 20.0) {
      --trial;
      continue;
    }
    int best = 0;
    double best_p = -1.0;
    for (int n : range) {
      const double v = n * 317e-6 * constant_flow_junction_drop(0.01, R_cell, R_gap, n);
      const double p = v * v / (4.0 * n * 100.0);
      if (p > best_p) {
        best_p = p;
        best = n;
      }
    }
    const double mismatch = std::abs(R_cell / best - R_gap) / R_gap;
    o.require(mismatch <= 0.05, "n* " + std::to_string(best) + " mismatch " + num("%.2e", mismatch));
  }
  return o;
}

// 6: headline output of the reference design.
Outcome headline() {
  Outcome o;
  const auto& cfg = reference();
  o.require(cfg.document == default_document(), "reference.config equals the compiled defaults");
  const auto dir = scratch("headline");
  o.require(run_cli({"gen", "simulate", "--config", default_reference_path(), "--out", dir.string(), "--no-timestamp"}) == 0,
            "gen simulate");
  const auto r = simulate(cfg.design, cfg.environment, cfg.simulation());
  o.require(r.V_oc >= 1.0, "V_oc " + num("%.4f", r.V_oc) + " V");
  o.require(r.P_matched >= 0.33e-6 && r.P_matched <= 3e-6, "P " + num("%.4f", r.P_matched * 1e6) + " uW");
  return o;
}

// 7: rim-effect ratios.
Outcome rim_ratios() {
  Outcome o;
  const auto& cfg = reference();
  for (bool forced : {true, false}) {
    const double rim = chuck_scenario(cfg.design, cfg.scenario, true, forced, false).density;
    const double bare = chuck_scenario(cfg.design, cfg.scenario, false, forced, false).density;
    o.require(rim / bare >= 2.0 && rim / bare <= 3.0,
              std::string(forced ? "forced" : "natural") + " ratio " + num("%.4f", rim / bare));
  }
  bool released_higher = true;
  for (bool rim : {false, true})
    for (bool forced : {false, true})
      released_higher = released_higher && chuck_scenario(cfg.design, cfg.scenario, rim, forced, true).density >
                                               chuck_scenario(cfg.design, cfg.scenario, rim, forced, false).density;
  o.require(released_higher, "released > unreleased at all flags");
  return o;
}

// 8: solver properties.
Outcome solver_properties() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double d = 0.5e-6, k = 3.0;
  const VoxelGrid slab = uniform_slab(8, 6, 20, d, k);
  const auto s = solve_steady_state(slab, 1e-6, 300.0);
  const double exact = 20 * d / (k * 8 * d * 6 * d);
  o.require(std::abs(s.resistance() / exact - 1.0) <= 0.02, "slab " + num("%.2e", s.resistance() / exact - 1.0));

  const auto& cfg = reference();
  const double kl = leg_conductivity(cfg.design.materials);
  const VoxelGrid cell = voxelize(cfg.design.cell, kl, cfg.solver.numeric.resolution);
  const auto a = solve_steady_state(cell, 1e-6, 300.0);
  const auto b = solve_steady_state(cell, 2e-6, 300.0);
  o.require(a.energy_imbalance() <= 1e-6, "energy " + num("%.1e", a.energy_imbalance()));
  // machine precision of the absolute temperature the drop is read from
  const double lin = std::abs(b.delta_t() - 2.0 * a.delta_t());
  o.require(lin <= 8.0 * std::numeric_limits<double>::epsilon() * a.top_temperature, "linearity " + num("%.1e", lin) + " K");

  std::vector<double> r;
  for (double res : {2.0, 4.0, 8.0}) {
    NumericOptions n = cfg.solver.numeric;
    n.resolution = res;
    r.push_back(cell_resistance_numeric(cfg.design.cell, kl, n).resistance);
  }
  const double d1 = r[1] - r[0], d2 = r[2] - r[1];
  o.require(std::abs(d2) < std::abs(d1) && d1 * d2 > 0.0,
            "refinement deltas " + num("%.4g", d1) + ", " + num("%.4g", d2));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < 60.0, "elapsed " + num("%.2f", secs) + " s");
  return o;
}

// 9: byte-identical output across repeated runs.
Outcome determinism() {
  Outcome o;
  const std::vector<std::vector<std::string>> commands = {
      {"materials", "zt"}, {"leg", "resistance"}, {"leg", "sweep-width"}, {"leg", "sweep-height"},
      {"leg", "sweep-mask"}, {"network", "solve"}, {"gen", "simulate"}, {"gen", "sweep"},
      {"gen", "optimize"}, {"scenario", "chuck"}};
  const auto a = scratch("det_a"), b = scratch("det_b");
  int files = 0;
  for (const auto& cmd : commands)
    for (const auto& dir : {a, b}) {
      auto args = cmd;
      args.insert(args.end(), {"--out", dir.string(), "--no-timestamp"});
      o.require(run_cli(args) == 0, cmd[0] + " " + cmd[1] + " runs");
    }
  bool same = true;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    same = same && slurp(entry.path()) == slurp(b / entry.path().filename());
  }
  o.detail.clear();
  o.require(same && files == static_cast<int>(commands.size()),
            std::to_string(files) + " files identical across two runs");
  return o;
}

}  // namespace

int main() {
  unsetenv(kConfigEnvVar);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 figure of merit", figure_of_merit_check},
      {"2 width endpoints", width_endpoints},
      {"3 height linearity", height_linearity},
      {"4 fill fraction", fill_fraction},
      {"5 matching optimum", matching_optimum},
      {"6 headline output", headline},
      {"7 rim ratios", rim_ratios},
      {"8 solver properties", solver_properties},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.ok) ++failed;
    std::printf("%s  criterion %-22s %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  fs::remove_all(fs::temp_directory_path() / ("tegsim_acceptance_" + std::to_string(::getpid())));
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

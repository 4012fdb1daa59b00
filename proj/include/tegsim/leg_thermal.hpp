#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tegsim/error.hpp"
#include "tegsim/geometry.hpp"
#include "tegsim/heat_solver.hpp"
#include "tegsim/parallel.hpp"
#include "tegsim/voxel.hpp"

namespace tegsim {

struct CellResistance {
  double total = 0.0;  // K/W
  double legs = 0.0;   // both legs in parallel
  double fill = std::numeric_limits<double>::infinity();
  std::string note;  // set when the fill branch is dropped
};

/// Thermal resistance of one leg from its segment list, sum of L/(k w t).
inline double leg_resistance(const ThermocoupleGeometry& g, double k_leg) {
  double r = 0.0;
  for (const auto& s : leg_segments(g)) r += s.length / (k_leg * s.width * s.thickness);
  return r;
}

/// Segmented-leg model: two identical legs in parallel, itself in parallel
/// with a fill column of height gap_height over the footprint left free by
/// the legs.
inline CellResistance analytic_cell_resistance(const UnitCell& cell, double k_leg) {
  detail::require(k_leg > 0.0, "analytic_cell_resistance: leg conductivity must be > 0");
  validate(cell);
  CellResistance out;
  out.legs = leg_resistance(cell.geometry, k_leg) / 2.0;
  const double area = fill_area(cell);
  if (area <= 1e-9 * cell_footprint(cell)) {
    out.total = out.legs;
    out.note = "fill area is zero; fill branch omitted";
    return out;
  }
  out.fill = cell.gap_height / (cell.fill_conductivity * area);
  out.total = 1.0 / (1.0 / out.legs + 1.0 / out.fill);
  return out;
}

struct NumericOptions {
  double resolution = 2.0;  // voxels per micrometer
  SolverOptions solver;
  std::size_t max_voxels = kDefaultVoxelBudget;
};

struct NumericResistance {
  double resistance = 0.0;  // K/W
  int iterations = 0;
  double residual = 0.0;
  double energy_imbalance = 0.0;
  std::size_t voxels = 0;
};

// Probe load for resistance extraction; the operator is linear so the value
// only sets the scale of the temperature field.
inline constexpr double kProbeHeatFlow = 1e-6;    // W
inline constexpr double kProbeTopTemperature = 300.0;  // K

/// Resistance extracted from a voxel solve: (mean inlet T - top T) / Q.
inline NumericResistance cell_resistance_numeric(const UnitCell& cell, double k_leg,
                                                 const NumericOptions& opts = {}) {
  const VoxelGrid grid = voxelize(cell, k_leg, opts.resolution, opts.max_voxels);
  const HeatSolution sol = solve_steady_state(grid, kProbeHeatFlow, kProbeTopTemperature, opts.solver);
  return {sol.resistance(), sol.iterations, sol.residual, sol.energy_imbalance(), grid.size()};
}

enum class Backend { Analytic, Numeric };

inline const char* to_string(Backend b) { return b == Backend::Analytic ? "analytic" : "numeric"; }

inline double cell_resistance(const UnitCell& cell, double k_leg, Backend backend, const NumericOptions& opts = {}) {
  return backend == Backend::Analytic ? analytic_cell_resistance(cell, k_leg).total
                                      : cell_resistance_numeric(cell, k_leg, opts).resistance;
}

struct SweepRow {
  double end_width_a = 0.0;
  double middle_width_b = 0.0;
  double step_height_h = 0.0;
  double resistance = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // empty when the row succeeded

  bool ok() const { return error.empty(); }
};

struct SweepOptions {
  Backend backend = Backend::Analytic;
  NumericOptions numeric;
  int parallelism = 1;
};

// Shared driver: one row per cell variant, per-row failures recorded.
inline std::vector<SweepRow> sweep_cells(const std::vector<UnitCell>& cells, double k_leg, const SweepOptions& opts) {
  return parallel_map(cells.size(), opts.parallelism, [&](std::size_t i) {
    const auto& g = cells[i].geometry;
    SweepRow row;
    row.end_width_a = g.end_width_a;
    row.middle_width_b = g.middle_width_b;
    row.step_height_h = g.step_height_h;
    try {
      row.resistance = cell_resistance(cells[i], k_leg, opts.backend, opts.numeric);
    } catch (const Error& e) {
      row.error = e.what();
    }
    return row;
  });
}

inline std::vector<SweepRow> sweep_width(const UnitCell& cell, double k_leg, const std::vector<double>& b_values,
                                         const SweepOptions& opts = {}) {
  detail::require(!b_values.empty(), "sweep_width: no width values");
  std::vector<UnitCell> cells;
  for (double b : b_values) cells.push_back(with_middle_width(cell, b));
  return sweep_cells(cells, k_leg, opts);
}

inline std::vector<SweepRow> sweep_height(const UnitCell& cell, double k_leg, const std::vector<double>& h_values,
                                          const SweepOptions& opts = {}) {
  detail::require(!h_values.empty(), "sweep_height: no height values");
  std::vector<UnitCell> cells;
  for (double h : h_values) cells.push_back(with_step_height(cell, h));
  return sweep_cells(cells, k_leg, opts);
}

struct MaskType {
  double end_width_a;
  double middle_width_b;
};

inline constexpr double kMaskStepHeight = 0.5e-6;

/// Thermocouple types laid out on the mask: end width 3..10 um, middle width 1..3 um.
inline std::vector<MaskType> default_mask_catalog() {
  std::vector<MaskType> out;
  for (double a : {3.0, 5.0, 10.0})
    for (double b : {1.0, 2.0, 3.0}) out.push_back({a * 1e-6, b * 1e-6});
  return out;
}

/// Every catalog type evaluated at the mask step height.
inline std::vector<SweepRow> sweep_mask_types(const UnitCell& cell, double k_leg, const std::vector<MaskType>& catalog,
                                              const SweepOptions& opts = {}, double step_height = kMaskStepHeight) {
  detail::require(!catalog.empty(), "sweep_mask_types: empty catalog");
  std::vector<UnitCell> cells;
  const UnitCell at_h = with_step_height(cell, step_height);
  for (const auto& m : catalog) cells.push_back(with_widths(at_h, m.end_width_a, m.middle_width_b));
  return sweep_cells(cells, k_leg, opts);
}

}  // namespace tegsim

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <vector>

#include "tegsim/error.hpp"
#include "tegsim/geometry.hpp"

namespace tegsim {

// How the prescribed heat flow enters through the bottom inlet cells.
enum class InletMode {
  IsothermalPlate,  // a perfectly conducting plate carrying Q; its temperature is solved for
  UniformFlux,      // Q spread as a uniform flux density over the inlet faces
};

// Regular cell-centered grid. Bottom face: inlet cells receive the heat flow,
// the rest of the bottom is adiabatic. Top face: fixed temperature. Sides:
// adiabatic. Voxels are indexed x-fastest.
struct VoxelGrid {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0, dz = 0.0;  // m
  std::vector<double> conductivity;     // W/(m*K), nx*ny*nz
  std::vector<std::uint8_t> inlet;      // nx*ny bottom cells
  InletMode inlet_mode = InletMode::IsothermalPlate;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * ny + j) * nx + i;
  }
  std::size_t floor_index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  double voxel_volume() const { return dx * dy * dz; }

  std::size_t count_conductivity(double k) const {
    return static_cast<std::size_t>(std::count(conductivity.begin(), conductivity.end(), k));
  }
  std::size_t inlet_count() const {
    return static_cast<std::size_t>(std::count(inlet.begin(), inlet.end(), std::uint8_t{1}));
  }
};

inline void validate(const VoxelGrid& g) {
  detail::validate(g.nx > 0 && g.ny > 0 && g.nz > 0, "voxel grid: empty grid");
  detail::validate(g.dx > 0.0 && g.dy > 0.0 && g.dz > 0.0, "voxel grid: spacing must be > 0");
  detail::validate(g.conductivity.size() == g.size(), "voxel grid: conductivity size mismatch");
  detail::validate(g.inlet.size() == static_cast<std::size_t>(g.nx) * g.ny, "voxel grid: inlet size mismatch");
  detail::validate(std::all_of(g.conductivity.begin(), g.conductivity.end(), [](double k) { return k > 0.0; }),
                   "voxel grid: all conductivities > 0 violated");
  detail::validate(g.inlet_count() > 0, "voxel grid: heat-flow inlet is empty");
}

/// Uniform block of conductivity k with the whole bottom as inlet.
inline VoxelGrid uniform_slab(int nx, int ny, int nz, double spacing, double k) {
  VoxelGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.dx = g.dy = g.dz = spacing;
  g.conductivity.assign(g.size(), k);
  g.inlet.assign(static_cast<std::size_t>(nx) * ny, 1);
  return g;
}

inline constexpr std::size_t kDefaultVoxelBudget = 20'000'000;

namespace detail {

struct Box {
  int i0, i1, j0, j1, k0, k1;  // half-open
};

inline void paint(VoxelGrid& g, const Box& b, double k) {
  for (int kk = std::max(b.k0, 0); kk < std::min(b.k1, g.nz); ++kk)
    for (int j = std::max(b.j0, 0); j < std::min(b.j1, g.ny); ++j)
      for (int i = std::max(b.i0, 0); i < std::min(b.i1, g.nx); ++i) g.conductivity[g.index(i, j, kk)] = k;
}

inline void mark_floor(std::vector<std::uint8_t>& mask, const VoxelGrid& g, const Box& b, std::uint8_t v) {
  for (int j = std::max(b.j0, 0); j < std::min(b.j1, g.ny); ++j)
    for (int i = std::max(b.i0, 0); i < std::min(b.i1, g.nx); ++i) mask[g.floor_index(i, j)] = v;
}

}  // namespace detail

/// Rasterizes a unit cell at `resolution` voxels per micrometer.
///
/// Every feature length is snapped to a whole number of voxels, so cells
/// whose dimensions are multiples of the spacing are represented exactly.
/// Legs and junction blocks take `k_leg`; everything else takes the fill
/// conductivity. The substrate contacts the floor everywhere except over a
/// trench under the legs (widened by `trench_margin`); the hot pad always
/// sits on the substrate. The cold pad extends up to the top chip as a bond
/// post.
inline VoxelGrid voxelize(const UnitCell& cell, double k_leg, double resolution,
                          std::size_t max_voxels = kDefaultVoxelBudget) {
  detail::require(resolution > 0.0, "voxelize: resolution must be > 0");
  detail::require(k_leg > 0.0, "voxelize: leg conductivity must be > 0");
  validate(cell);
  const auto& geo = cell.geometry;
  const double d = 1e-6 / resolution;
  auto cells = [d](double len) { return static_cast<int>(std::llround(len / d)); };

  VoxelGrid g;
  g.nx = cells(cell.cell_pitch_x);
  g.ny = cells(cell.cell_pitch_y);
  g.nz = cells(cell.gap_height);
  g.dx = g.dy = g.dz = d;
  const double n = static_cast<double>(g.nx) * g.ny * g.nz;
  if (n > static_cast<double>(max_voxels)) {
    const double suggested = std::floor(resolution * std::cbrt(max_voxels / n) * 4.0) / 4.0;
    std::ostringstream msg;
    msg << "voxelize: " << n << " voxels exceed the budget of " << max_voxels << "; try resolution "
        << suggested << " voxels/um";
    throw ResourceError(msg.str(), suggested);
  }
  detail::validate(g.nx > 0 && g.ny > 0 && g.nz > 0, "voxelize: resolution too coarse for the cell");
  g.conductivity.assign(g.size(), cell.fill_conductivity);
  g.inlet.assign(static_cast<std::size_t>(g.nx) * g.ny, 1);

  const int n_pad = cells(cell.junction_pad_length);
  const int n_end = cells(geo.end_segment_length);
  const int n_mid = cells(geo.middle_segment_length);
  const int n_t = std::max(cells(geo.film_thickness_t), 1);
  const int n_h = cells(geo.step_height_h);
  const int run = 2 * n_pad + 2 * n_end + n_mid;
  const int x_hot = (g.nx - run) / 2;  // hot pad start
  const int x_end_hot = x_hot + n_pad;
  const int x_mid = x_end_hot + n_end;
  const int x_step = x_mid + n_mid;
  const int x_end_cold = x_step + n_end;
  const int x_stop = x_end_cold + n_pad;
  const int n_margin = cells(cell.trench_margin);

  std::vector<std::uint8_t> trench(g.inlet.size(), 0);
  std::vector<detail::Box> pads;
  const double lane = cell.cell_pitch_y / 2.0;
  for (int leg = 0; leg < 2; ++leg) {
    auto span = [&](double w) {
      const int j0 = cells(leg * lane + (lane - w) / 2.0);
      return std::pair{j0, j0 + cells(w)};
    };
    const auto [ja0, ja1] = span(geo.end_width_a);
    const auto [jb0, jb1] = span(geo.middle_width_b);

    const detail::Box hot_pad{x_hot, x_end_hot, ja0, ja1, 0, n_t};
    const detail::Box hot_end{x_end_hot, x_mid, ja0, ja1, 0, n_t};
    const detail::Box middle{x_mid, x_step, jb0, jb1, 0, n_t};
    const detail::Box riser{std::max(x_step - n_t, x_mid), x_step, jb0, jb1, 0, n_h + n_t};
    const detail::Box cold_end{x_step, x_end_cold, ja0, ja1, n_h, n_h + n_t};
    const detail::Box cold_post{x_end_cold, x_stop, ja0, ja1, n_h, g.nz};
    for (const auto& b : {hot_pad, hot_end, middle, riser, cold_end, cold_post}) detail::paint(g, b, k_leg);

    for (const auto& b : {hot_end, middle, cold_end, cold_post}) {
      const detail::Box wide{b.i0 - n_margin, b.i1 + n_margin, b.j0 - n_margin, b.j1 + n_margin, 0, 1};
      detail::mark_floor(trench, g, wide, 1);
    }
    pads.push_back(hot_pad);
  }
  for (const auto& p : pads) detail::mark_floor(trench, g, p, 0);
  for (std::size_t c = 0; c < trench.size(); ++c) g.inlet[c] = trench[c] ? 0 : 1;
  return g;
}

}  // namespace tegsim

#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "tegsim/error.hpp"
#include "tegsim/voxel.hpp"

namespace tegsim {

struct SolverOptions {
  double relative_tolerance = 1e-8;
  int max_iterations = 0;  // 0: 50 * (nx + ny + nz)
};

struct HeatSolution {
  std::vector<double> temperature;  // K, per voxel
  double heat_flow = 0.0;           // W injected
  double bottom_temperature = 0.0;  // K, mean over the inlet
  double top_temperature = 0.0;     // K
  double flux_in = 0.0;             // W through the inlet, from the field
  double flux_out = 0.0;            // W through the top face, from the field
  int iterations = 0;
  double residual = 0.0;  // final relative residual

  double delta_t() const { return bottom_temperature - top_temperature; }
  double resistance() const { return delta_t() / heat_flow; }
  double energy_imbalance() const { return std::abs(flux_in - flux_out) / heat_flow; }
};

namespace detail {

// Finite-volume conduction operator on the grid, with an optional extra
// unknown for the isothermal inlet plate (stored last). Unknowns are the
// temperature rise above the top face.
class ConductionOperator {
 public:
  explicit ConductionOperator(const VoxelGrid& g) : g_(g) {
    const std::size_t n = g.size();
    gx_.assign(n, 0.0);
    gy_.assign(n, 0.0);
    gz_.assign(n, 0.0);
    const std::size_t floor = static_cast<std::size_t>(g.nx) * g.ny;
    gtop_.assign(floor, 0.0);
    gbot_.assign(floor, 0.0);
    plate_ = g.inlet_mode == InletMode::IsothermalPlate;
    diag_.assign(unknowns(), 0.0);

    const double ax = g.dy * g.dz / g.dx, ay = g.dx * g.dz / g.dy, az = g.dx * g.dy / g.dz;
    auto harmonic = [](double a, double b) { return 2.0 * a * b / (a + b); };
    const auto& k = g.conductivity;
    for (int kk = 0; kk < g.nz; ++kk)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const std::size_t c = g.index(i, j, kk);
          if (i + 1 < g.nx) add_link(gx_, c, g.index(i + 1, j, kk), harmonic(k[c], k[g.index(i + 1, j, kk)]) * ax);
          if (j + 1 < g.ny) add_link(gy_, c, g.index(i, j + 1, kk), harmonic(k[c], k[g.index(i, j + 1, kk)]) * ay);
          if (kk + 1 < g.nz) add_link(gz_, c, g.index(i, j, kk + 1), harmonic(k[c], k[g.index(i, j, kk + 1)]) * az);
        }
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t f = g.floor_index(i, j);
        const std::size_t top = g.index(i, j, g.nz - 1);
        gtop_[f] = 2.0 * k[top] * az;
        diag_[top] += gtop_[f];
        if (plate_ && g.inlet[f]) {
          const std::size_t bot = g.index(i, j, 0);
          gbot_[f] = 2.0 * k[bot] * az;
          diag_[bot] += gbot_[f];
          diag_.back() += gbot_[f];
        }
      }
  }

  std::size_t unknowns() const { return g_.size() + (plate_ ? 1 : 0); }
  const std::vector<double>& diagonal() const { return diag_; }
  bool has_plate() const { return plate_; }

  void apply(const std::vector<double>& v, std::vector<double>& out) const {
    const std::size_t n = g_.size();
    for (std::size_t c = 0; c < unknowns(); ++c) out[c] = diag_[c] * v[c];
    const std::size_t sx = 1, sy = static_cast<std::size_t>(g_.nx), sz = sy * g_.ny;
    for (std::size_t c = 0; c < n; ++c) {
      if (gx_[c] != 0.0) { out[c] -= gx_[c] * v[c + sx]; out[c + sx] -= gx_[c] * v[c]; }
      if (gy_[c] != 0.0) { out[c] -= gy_[c] * v[c + sy]; out[c + sy] -= gy_[c] * v[c]; }
      if (gz_[c] != 0.0) { out[c] -= gz_[c] * v[c + sz]; out[c + sz] -= gz_[c] * v[c]; }
    }
    if (plate_) {
      const std::size_t p = n;
      for (std::size_t f = 0; f < gbot_.size(); ++f) {
        if (gbot_[f] == 0.0) continue;
        out[f] -= gbot_[f] * v[p];
        out[p] -= gbot_[f] * v[f];
      }
    }
  }

  // Heat leaving through the top face for a temperature-rise field.
  double top_flux(const std::vector<double>& rise) const {
    double q = 0.0;
    const std::size_t base = static_cast<std::size_t>(g_.nz - 1) * g_.nx * g_.ny;
    for (std::size_t f = 0; f < gtop_.size(); ++f) q += gtop_[f] * rise[base + f];
    return q;
  }

  double plate_flux(const std::vector<double>& rise) const {
    double q = 0.0;
    const double tp = rise[g_.size()];
    for (std::size_t f = 0; f < gbot_.size(); ++f) q += gbot_[f] * (tp - rise[f]);
    return q;
  }

 private:
  void add_link(std::vector<double>& store, std::size_t a, std::size_t b, double cond) {
    store[a] = cond;
    diag_[a] += cond;
    diag_[b] += cond;
  }

  const VoxelGrid& g_;
  std::vector<double> gx_, gy_, gz_, gtop_, gbot_, diag_;
  bool plate_ = true;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Steady conduction with heat flow `heat_flow` entering through the inlet and
/// the top face held at `top_temperature`. Jacobi-preconditioned conjugate
/// gradients on the symmetric positive definite finite-volume system; face
/// conductances use the harmonic mean of the adjacent voxels.
inline HeatSolution solve_steady_state(const VoxelGrid& grid, double heat_flow, double top_temperature,
                                       const SolverOptions& opts = {}) {
  detail::require(heat_flow > 0.0, "solve_steady_state: heat flow must be > 0");
  detail::require(opts.relative_tolerance > 0.0, "solve_steady_state: tolerance must be > 0");
  validate(grid);

  const detail::ConductionOperator op(grid);
  const std::size_t n = op.unknowns();
  const std::size_t nvox = grid.size();
  const auto& diag = op.diagonal();

  std::vector<double> rhs(n, 0.0);
  if (op.has_plate()) {
    rhs.back() = heat_flow;
  } else {
    const double share = heat_flow / static_cast<double>(grid.inlet_count());
    for (std::size_t f = 0; f < grid.inlet.size(); ++f)
      if (grid.inlet[f]) rhs[f] = share;
  }

  std::vector<double> x(n, 0.0), r = rhs, z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = detail::dot(r, z);
  const double bnorm = std::sqrt(detail::dot(rhs, rhs));
  const int cap = opts.max_iterations > 0 ? opts.max_iterations : 50 * (grid.nx + grid.ny + grid.nz);

  std::vector<double> history;
  double rel = 1.0;
  int it = 0;
  while (it < cap) {
    ++it;
    op.apply(p, ap);
    const double alpha = rz / detail::dot(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    rel = std::sqrt(detail::dot(r, r)) / bnorm;
    history.push_back(rel);
    if (rel <= opts.relative_tolerance) break;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_next = detail::dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (rel > opts.relative_tolerance) {
    std::ostringstream msg;
    msg << "solve_steady_state: no convergence after " << it << " iterations (relative residual " << rel
        << ", target " << opts.relative_tolerance << ")";
    throw SolverError(msg.str(), std::move(history));
  }

  HeatSolution sol;
  sol.heat_flow = heat_flow;
  sol.top_temperature = top_temperature;
  sol.iterations = it;
  sol.residual = rel;
  sol.flux_out = op.top_flux(x);
  if (op.has_plate()) {
    sol.flux_in = op.plate_flux(x);
    sol.bottom_temperature = x.back() + top_temperature;
  } else {
    sol.flux_in = heat_flow;
    const double q_face = heat_flow / (static_cast<double>(grid.inlet_count()) * grid.dx * grid.dy);
    double sum = 0.0;
    for (std::size_t f = 0; f < grid.inlet.size(); ++f)
      if (grid.inlet[f]) sum += x[f] + q_face * 0.5 * grid.dz / grid.conductivity[f];
    sol.bottom_temperature = sum / static_cast<double>(grid.inlet_count()) + top_temperature;
  }
  sol.temperature.resize(nvox);
  for (std::size_t i = 0; i < nvox; ++i) sol.temperature[i] = x[i] + top_temperature;
  return sol;
}

}  // namespace tegsim

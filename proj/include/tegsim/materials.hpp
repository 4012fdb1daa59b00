#pragma once

#include <cmath>
#include <string>

#include "tegsim/error.hpp"
#include "tegsim/units.hpp"

namespace tegsim {

// Transport constants of one thermoelectric film, SI units.
struct MaterialProps {
  double seebeck_coefficient = 0.0;          // V/K, p > 0, n < 0
  double electrical_resistivity = 1.0;       // ohm*m
  double thermal_conductivity = 1.0;         // W/(m*K)
  double specific_contact_resistance = 0.0;  // ohm*m^2, film to aluminum

  friend bool operator==(const MaterialProps&, const MaterialProps&) = default;
};

struct CoupleMaterials {
  MaterialProps p;
  MaterialProps n;

  double seebeck_difference() const { return p.seebeck_coefficient - n.seebeck_coefficient; }

  friend bool operator==(const CoupleMaterials&, const CoupleMaterials&) = default;
};

inline void validate(const MaterialProps& m, const std::string& label) {
  detail::validate(std::isfinite(m.seebeck_coefficient), label + ": seebeck_coefficient must be finite");
  detail::validate(m.electrical_resistivity > 0.0, label + ": electrical_resistivity > 0 violated");
  detail::validate(m.thermal_conductivity > 0.0, label + ": thermal_conductivity > 0 violated");
  detail::validate(m.specific_contact_resistance >= 0.0,
                   label + ": specific_contact_resistance >= 0 violated");
}

inline void validate(const CoupleMaterials& pair) {
  validate(pair.p, "materials.p");
  validate(pair.n, "materials.n");
  detail::validate(pair.p.seebeck_coefficient != pair.n.seebeck_coefficient,
                   "materials: p.seebeck != n.seebeck violated (zero-output couple)");
}

/// Characterized p- and n-type poly-SiGe films.
inline CoupleMaterials builtin_poly_sige() {
  using namespace units;
  CoupleMaterials pair;
  pair.p = {69.0 * uV_per_K, 1.05 * mOhm_cm, 3.0, 86.0 * Ohm_um2};
  pair.n = {-248.0 * uV_per_K, 5.87 * mOhm_cm, 3.0, 40.0 * Ohm_um2};
  return pair;
}

// Figures of merit quoted alongside the characterization data. The p-type
// value does not follow from S^2 T/(rho k) with the quoted constants; reports
// show both.
inline constexpr double kReportedZtP = 0.025;
inline constexpr double kReportedZtN = 0.096;
inline constexpr double kRoomTemperature = 300.0;  // K

/// Z*T = S^2 T / (rho k).
inline double figure_of_merit(const MaterialProps& mat, double temperature) {
  detail::require(temperature > 0.0, "figure_of_merit: temperature must be > 0 K");
  const double s = mat.seebeck_coefficient;
  return s * s * temperature / (mat.electrical_resistivity * mat.thermal_conductivity);
}

/// Couple Z*T with Z = (S_p - S_n)^2 / (sqrt(rho_p k_p) + sqrt(rho_n k_n))^2.
inline double couple_figure_of_merit(const CoupleMaterials& pair, double temperature) {
  detail::require(temperature > 0.0, "couple_figure_of_merit: temperature must be > 0 K");
  const double ds = pair.seebeck_difference();
  const double denom = std::sqrt(pair.p.electrical_resistivity * pair.p.thermal_conductivity) +
                       std::sqrt(pair.n.electrical_resistivity * pair.n.thermal_conductivity);
  return ds * ds / (denom * denom) * temperature;
}

inline double contact_resistance(const MaterialProps& mat, double contact_area) {
  detail::require(contact_area > 0.0, "contact_resistance: contact area must be > 0");
  return mat.specific_contact_resistance / contact_area;
}

}  // namespace tegsim

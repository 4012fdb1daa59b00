#pragma once

// Conversion factors between the laboratory units used in configuration
// files and reports and the SI units used everywhere internally.
namespace tegsim::units {

inline constexpr double um = 1e-6;               // m
inline constexpr double um2 = 1e-12;             // m^2
inline constexpr double cm2 = 1e-4;              // m^2
inline constexpr double uV_per_K = 1e-6;         // V/K
inline constexpr double mOhm_cm = 1e-5;          // ohm*m
inline constexpr double Ohm_um2 = 1e-12;         // ohm*m^2
inline constexpr double K_cm2_per_W = 1e-4;      // K*m^2/W
inline constexpr double zero_celsius = 273.15;   // K

constexpr double celsius_to_kelvin(double c) { return c + zero_celsius; }
constexpr double kelvin_to_celsius(double k) { return k - zero_celsius; }

// V/(K*m^2) -> mV/(K*cm^2)
inline constexpr double to_mV_per_K_cm2 = 1e3 * cm2;

}  // namespace tegsim::units

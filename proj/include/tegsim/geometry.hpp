#pragma once

#include <array>
#include <string>

#include "tegsim/error.hpp"

namespace tegsim {

// Stepped thermocouple leg. Each leg runs hot pad -> wide end -> narrow
// middle (climbing the step) -> wide end -> cold pad. All lengths in meters.
struct ThermocoupleGeometry {
  double end_width_a = 10e-6;
  double middle_width_b = 3e-6;
  double step_height_h = 0.5e-6;
  double film_thickness_t = 1.5e-6;
  double end_segment_length = 0.5e-6;   // per end, per leg
  double middle_segment_length = 6e-6;  // planar length, step excluded
  double step_path_factor_gamma = 2.0;  // path added per unit step height

  friend bool operator==(const ThermocoupleGeometry&, const ThermocoupleGeometry&) = default;
};

// One thermocouple and its share of the inter-chip gap. The pad length and
// trench margin only shape the voxel model; the analytic model ignores them.
struct UnitCell {
  ThermocoupleGeometry geometry;
  double cell_pitch_x = 15.5e-6;  // along the legs
  double cell_pitch_y = 22e-6;    // across the two legs
  double gap_height = 2.5e-6;     // substrate to top chip
  double fill_conductivity = 0.026;
  double junction_pad_length = 2e-6;
  double trench_margin = 2e-6;

  friend bool operator==(const UnitCell&, const UnitCell&) = default;
};

struct RimLayout {
  int n_couples = 2350;
  double couple_pitch = 22e-6;
  double rim_band_width = 100e-6;
  double die_side = 17.5e-3;
  double etch_depth = 250e-6;
  int rows = 2;  // couple rows along each rim edge

  friend bool operator==(const RimLayout&, const RimLayout&) = default;
};

struct LegSegment {
  double length;  // conduction path length
  double width;
  double thickness;
};

// Handbook fill conductivities, W/(m*K).
inline constexpr double kAirConductivity = 0.026;
inline constexpr double kTeosConductivity = 1.4;

inline void validate(const ThermocoupleGeometry& g) {
  detail::validate(g.middle_width_b > 0.0, "geometry: middle_width_b > 0 violated");
  detail::validate(g.end_width_a >= g.middle_width_b, "geometry: end_width_a >= middle_width_b violated");
  detail::validate(g.film_thickness_t > 0.0, "geometry: film_thickness_t > 0 violated");
  detail::validate(g.step_height_h >= 0.0, "geometry: step_height_h >= 0 violated");
  detail::validate(g.end_segment_length > 0.0 && g.middle_segment_length > 0.0,
                   "geometry: segment lengths > 0 violated");
  detail::validate(g.step_path_factor_gamma >= 0.0, "geometry: step_path_factor_gamma >= 0 violated");
}

/// Three segments per leg: [end, middle + gamma*h, end].
inline std::array<LegSegment, 3> leg_segments(const ThermocoupleGeometry& g) {
  validate(g);
  const double t = g.film_thickness_t;
  const double middle = g.middle_segment_length + g.step_path_factor_gamma * g.step_height_h;
  return {LegSegment{g.end_segment_length, g.end_width_a, t}, LegSegment{middle, g.middle_width_b, t},
          LegSegment{g.end_segment_length, g.end_width_a, t}};
}

inline double leg_path_length(const ThermocoupleGeometry& g) {
  double total = 0.0;
  for (const auto& s : leg_segments(g)) total += s.length;
  return total;
}

// Projected area of one leg on the substrate (the riser is vertical).
inline double leg_planform_area(const ThermocoupleGeometry& g) {
  return 2.0 * g.end_segment_length * g.end_width_a + g.middle_segment_length * g.middle_width_b;
}

inline double cell_footprint(const UnitCell& c) { return c.cell_pitch_x * c.cell_pitch_y; }

// Footprint share not covered by either leg.
inline double fill_area(const UnitCell& c) { return cell_footprint(c) - 2.0 * leg_planform_area(c.geometry); }

inline void validate(const UnitCell& c) {
  validate(c.geometry);
  const auto& g = c.geometry;
  detail::validate(c.fill_conductivity > 0.0, "cell: fill_conductivity > 0 violated");
  detail::validate(c.junction_pad_length >= 0.0 && c.trench_margin >= 0.0,
                   "cell: junction_pad_length >= 0 and trench_margin >= 0 violated");
  detail::validate(c.cell_pitch_y >= 2.0 * g.end_width_a,
                   "cell: cell_pitch_y >= 2 * end_width_a violated (both legs must fit)");
  const double run = 2.0 * g.end_segment_length + g.middle_segment_length + 2.0 * c.junction_pad_length;
  detail::validate(c.cell_pitch_x >= run,
                   "cell: cell_pitch_x >= 2*end_segment_length + middle_segment_length + 2*junction_pad_length "
                   "violated");
  // The top chip rests on the raised cold junction.
  detail::validate(c.gap_height >= g.step_height_h + g.film_thickness_t,
                   "cell: gap_height >= step_height_h + film_thickness_t violated");
}

// Same cell with a new step height. The gap follows the step so the bond
// post between cold junction and top chip keeps its height.
inline UnitCell with_step_height(const UnitCell& c, double h) {
  UnitCell out = c;
  out.geometry.step_height_h = h;
  out.gap_height = c.gap_height + (h - c.geometry.step_height_h);
  return out;
}

inline UnitCell with_middle_width(const UnitCell& c, double b) {
  UnitCell out = c;
  out.geometry.middle_width_b = b;
  return out;
}

inline UnitCell with_widths(const UnitCell& c, double a, double b) {
  UnitCell out = c;
  out.geometry.end_width_a = a;
  out.geometry.middle_width_b = b;
  return out;
}

struct RimCheck {
  bool ok = true;
  double capacity = 0.0;  // m of rim available
  double required = 0.0;  // m of rim needed
  double deficit = 0.0;   // m, zero when ok
};

// Couples are placed in `rows` single rows along the centerline of the rim
// band on each of the four die edges.
inline RimCheck validate_rim(const RimLayout& layout) {
  RimCheck check;
  check.capacity = 4.0 * (layout.die_side - layout.rim_band_width) * layout.rows;
  check.required = layout.n_couples * layout.couple_pitch;
  check.ok = check.required <= check.capacity;
  check.deficit = check.ok ? 0.0 : check.required - check.capacity;
  return check;
}

inline void validate(const RimLayout& l) {
  detail::validate(l.n_couples >= 0, "layout: n_couples >= 0 violated");
  detail::validate(l.etch_depth > 0.0, "layout: etch_depth > 0 violated");
  detail::validate(l.couple_pitch > 0.0, "layout: couple_pitch > 0 violated");
  detail::validate(l.rows >= 1, "layout: rows >= 1 violated");
  detail::validate(l.die_side > 2.0 * l.rim_band_width && l.rim_band_width > 0.0,
                   "layout: die_side > 2 * rim_band_width > 0 violated");
}

}  // namespace tegsim

#include <catch_amalgamated.hpp>

#include "tegsim/geometry.hpp"

using namespace tegsim;
using Catch::Approx;

namespace {

ThermocoupleGeometry example_geometry() {
  ThermocoupleGeometry g;
  g.end_width_a = 10e-6;
  g.middle_width_b = 3e-6;
  g.step_height_h = 0.0;
  g.film_thickness_t = 1e-6;
  g.end_segment_length = 2e-6;
  g.middle_segment_length = 5e-6;
  g.step_path_factor_gamma = 2.0;
  return g;
}

}  // namespace

TEST_CASE("leg segments without a step", "[geometry]") {
  const auto segs = leg_segments(example_geometry());
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].length == Approx(2e-6));
  CHECK(segs[0].width == Approx(10e-6));
  CHECK(segs[1].length == Approx(5e-6));
  CHECK(segs[1].width == Approx(3e-6));
  CHECK(segs[2].length == Approx(2e-6));
  CHECK(segs[2].width == Approx(10e-6));
  for (const auto& s : segs) CHECK(s.thickness == Approx(1e-6));
}

TEST_CASE("step lengthens the middle segment", "[geometry]") {
  auto g = example_geometry();
  g.step_height_h = 2.5e-6;
  CHECK(leg_segments(g)[1].length == Approx(10e-6));

  g.step_height_h = 1e-6;
  const double l1 = leg_segments(g)[1].length;
  g.step_height_h = 2e-6;
  const double l2 = leg_segments(g)[1].length;
  CHECK(l2 - l1 == Approx(g.step_path_factor_gamma * 1e-6).epsilon(1e-12));
}

TEST_CASE("path length is affine in h with slope gamma; ends symmetric", "[geometry]") {
  for (double gamma : {0.0, 1.0, 2.0, 3.5}) {
    auto g = example_geometry();
    g.step_path_factor_gamma = gamma;
    g.step_height_h = 0.0;
    const double base = leg_path_length(g);
    for (int i = 1; i <= 30; ++i) {
      g.step_height_h = i * 0.1e-6;
      CHECK(leg_path_length(g) - base == Approx(gamma * g.step_height_h).margin(1e-18));
      const auto segs = leg_segments(g);
      CHECK(segs.front().length == segs.back().length);
      CHECK(segs.front().width == segs.back().width);
      CHECK(segs.front().thickness == segs.back().thickness);
    }
  }
}

TEST_CASE("geometry invariants are enforced", "[geometry]") {
  auto g = example_geometry();
  g.middle_width_b = 12e-6;
  CHECK_THROWS_WITH(validate(g), Catch::Matchers::ContainsSubstring("end_width_a >= middle_width_b"));
  g = example_geometry();
  g.middle_width_b = 0.0;
  CHECK_THROWS_AS(validate(g), ValidationError);
  g = example_geometry();
  g.film_thickness_t = 0.0;
  CHECK_THROWS_AS(validate(g), ValidationError);
  g = example_geometry();
  g.step_height_h = -1e-6;
  CHECK_THROWS_AS(validate(g), ValidationError);
  g = example_geometry();
  g.end_segment_length = 0.0;
  CHECK_THROWS_AS(leg_segments(g), ValidationError);
}

TEST_CASE("unit cell invariants", "[geometry]") {
  UnitCell c;
  CHECK_NOTHROW(validate(c));
  UnitCell narrow = c;
  narrow.cell_pitch_y = 1.5 * c.geometry.end_width_a;
  CHECK_THROWS_AS(validate(narrow), ValidationError);
  UnitCell short_cell = c;
  short_cell.cell_pitch_x = 5e-6;
  CHECK_THROWS_AS(validate(short_cell), ValidationError);
  UnitCell low = c;
  low.gap_height = c.geometry.step_height_h;
  CHECK_THROWS_WITH(validate(low), Catch::Matchers::ContainsSubstring("gap_height"));
}

TEST_CASE("footprint and fill area", "[geometry]") {
  UnitCell c;
  const auto& g = c.geometry;
  CHECK(cell_footprint(c) == Approx(15.5e-6 * 22e-6));
  CHECK(leg_planform_area(g) == Approx(2 * 0.5e-6 * 10e-6 + 6e-6 * 3e-6));
  CHECK(fill_area(c) == Approx(285e-12));
}

TEST_CASE("variant helpers", "[geometry]") {
  UnitCell c;
  const UnitCell taller = with_step_height(c, 2e-6);
  CHECK(taller.geometry.step_height_h == Approx(2e-6));
  CHECK(taller.gap_height - c.gap_height == Approx(1.5e-6));
  const UnitCell wide = with_widths(c, 5e-6, 2e-6);
  CHECK(wide.geometry.end_width_a == 5e-6);
  CHECK(wide.geometry.middle_width_b == 2e-6);
  CHECK(with_middle_width(c, 1e-6).geometry.middle_width_b == 1e-6);
}

TEST_CASE("rim capacity check", "[geometry]") {
  RimLayout l;
  l.die_side = 20e-3;
  l.rim_band_width = 100e-6;
  l.couple_pitch = 30e-6;
  l.rows = 1;

  l.n_couples = 0;
  CHECK(validate_rim(l).ok);

  l.n_couples = 2350;
  const RimCheck ok = validate_rim(l);
  CHECK(ok.ok);
  CHECK(ok.deficit == 0.0);
  CHECK(ok.required == Approx(70.5e-3));

  l.n_couples = 4700;
  const RimCheck bad = validate_rim(l);
  CHECK_FALSE(bad.ok);
  CHECK(bad.deficit == Approx(6.1e-2).margin(0.1e-2));

  l.rows = 2;
  CHECK(validate_rim(l).ok);
}

TEST_CASE("layout invariants", "[geometry]") {
  RimLayout l;
  CHECK_NOTHROW(validate(l));
  l.etch_depth = 0.0;
  CHECK_THROWS_AS(validate(l), ValidationError);
  l = RimLayout{};
  l.rows = 0;
  CHECK_THROWS_AS(validate(l), ValidationError);
}

#include <catch_amalgamated.hpp>

#include <random>

#include "tegsim/materials.hpp"

using namespace tegsim;
using Catch::Approx;

// Reference values evaluated by hand at 30 significant digits.
static constexpr double kZtN300 = 0.104776831345826;
static constexpr double kZtP300 = 0.0453428571428571;
static constexpr double kZtN293 = 0.102332038614424;
static constexpr double kZtCouple300 = 0.0845491268731816;

TEST_CASE("builtin poly-SiGe constants", "[materials]") {
  const auto m = builtin_poly_sige();
  CHECK(m.p.seebeck_coefficient == Approx(69e-6).epsilon(1e-12));
  CHECK(m.n.seebeck_coefficient == Approx(-248e-6).epsilon(1e-12));
  CHECK(m.p.electrical_resistivity == Approx(1.05e-5).epsilon(1e-12));
  CHECK(m.n.electrical_resistivity == Approx(5.87e-5).epsilon(1e-12));
  CHECK(m.p.thermal_conductivity == 3.0);
  CHECK(m.n.thermal_conductivity == 3.0);
  CHECK(m.p.specific_contact_resistance == Approx(86e-12).epsilon(1e-12));
  CHECK(m.n.specific_contact_resistance == Approx(40e-12).epsilon(1e-12));
  CHECK(m.seebeck_difference() == Approx(317e-6).epsilon(1e-12));
  CHECK_NOTHROW(validate(m));
}

TEST_CASE("figure of merit values", "[materials]") {
  const auto m = builtin_poly_sige();
  CHECK(figure_of_merit(m.n, 300.0) == Approx(kZtN300).epsilon(1e-12));
  CHECK(figure_of_merit(m.p, 300.0) == Approx(kZtP300).epsilon(1e-12));
  CHECK(figure_of_merit(m.n, 293.0) == Approx(kZtN293).epsilon(1e-12));
  CHECK(couple_figure_of_merit(m, 300.0) == Approx(kZtCouple300).epsilon(1e-12));

  MaterialProps zero = m.n;
  zero.seebeck_coefficient = 0.0;
  CHECK(figure_of_merit(zero, 300.0) == 0.0);

  CHECK_THROWS_AS(figure_of_merit(m.n, 0.0), InvalidInput);
  CHECK_THROWS_AS(figure_of_merit(m.n, -5.0), InvalidInput);
  CHECK_THROWS_AS(couple_figure_of_merit(m, 0.0), InvalidInput);
}

TEST_CASE("couple figure of merit edge cases", "[materials]") {
  MaterialProps base{150e-6, 2e-5, 2.0, 0.0};
  CoupleMaterials sym{base, base};
  sym.n.seebeck_coefficient = -base.seebeck_coefficient;
  CHECK(couple_figure_of_merit(sym, 310.0) == Approx(figure_of_merit(base, 310.0)).epsilon(1e-12));

  CoupleMaterials same{base, base};
  CHECK(couple_figure_of_merit(same, 300.0) == 0.0);
  CHECK_THROWS_AS(validate(same), ValidationError);
}

TEST_CASE("contact resistance", "[materials]") {
  const auto m = builtin_poly_sige();
  CHECK(contact_resistance(m.p, 1e-10) == Approx(0.86).epsilon(1e-12));
  CHECK(contact_resistance(m.n, 40e-12) == Approx(1.0).epsilon(1e-12));
  MaterialProps ideal = m.p;
  ideal.specific_contact_resistance = 0.0;
  CHECK(contact_resistance(ideal, 3e-11) == 0.0);
  CHECK_THROWS_AS(contact_resistance(m.p, 0.0), InvalidInput);
  CHECK_THROWS_AS(contact_resistance(m.p, -1e-12), InvalidInput);
}

TEST_CASE("material validation", "[materials]") {
  MaterialProps bad = builtin_poly_sige().p;
  bad.electrical_resistivity = 0.0;
  CHECK_THROWS_AS(validate(bad, "p"), ValidationError);
  bad = builtin_poly_sige().p;
  bad.thermal_conductivity = -1.0;
  CHECK_THROWS_AS(validate(bad, "p"), ValidationError);
  bad = builtin_poly_sige().p;
  bad.specific_contact_resistance = -1e-12;
  CHECK_THROWS_AS(validate(bad, "p"), ValidationError);
}

TEST_CASE("figure of merit properties", "[materials]") {
  std::mt19937 rng(20261016);
  std::uniform_real_distribution<double> s(-400e-6, 400e-6), rho(1e-6, 1e-3), k(0.5, 50.0), T(50.0, 1000.0),
      area(1e-12, 1e-8), rc(0.0, 1e-9);
  for (int i = 0; i < 200; ++i) {
    MaterialProps m{s(rng), rho(rng), k(rng), rc(rng)};
    const double t = T(rng);
    MaterialProps flipped = m;
    flipped.seebeck_coefficient = -m.seebeck_coefficient;
    CHECK(figure_of_merit(flipped, t) == figure_of_merit(m, t));
    CHECK(figure_of_merit(m, 2.0 * t) == Approx(2.0 * figure_of_merit(m, t)).epsilon(1e-14));
    const double a = area(rng);
    CHECK(contact_resistance(m, 2.0 * a) == Approx(0.5 * contact_resistance(m, a)).epsilon(1e-14));
  }
}

#include <doctest.h>

#include <cmath>

#include "hydro/equilibrium.hpp"
#include "hydro/error.hpp"
#include "hydro/flux_curve.hpp"
#include "hydro/phase.hpp"

using namespace hydro;

namespace {

struct Transition {
  double r;
  int from;
  int to;
};

std::vector<Transition> sweep(double d, double r0, double r1, double step) {
  std::vector<Transition> out;
  int previous = classify_shape(d, r0).inflexions;
  for (double r = r0 + step; r <= r1; r += step) {
    const int now = classify_shape(d, r).inflexions;
    if (now != previous) out.push_back({r - 0.5 * step, previous, now});
    previous = now;
  }
  return out;
}

double curvature_fd(double d, double r, double rho) {
  const double h = 1e-4;
  return (two_lane_flux(d, 1 - d, r, rho + h) - 2 * two_lane_flux(d, 1 - d, r, rho) + two_lane_flux(d, 1 - d, r, rho - h)) /
         (h * h);
}

}  // namespace

TEST_CASE("critical asymmetry constants") {
  CHECK(std::abs(phase::d_tilde_1() - (0.5 + std::sqrt(3 + 2 * std::sqrt(3.0)) / 6)) <= 1e-12);
  CHECK(std::abs(phase::d_tilde_0() - (0.5 + std::sqrt(3.0) / 4)) <= 1e-12);
  CHECK(std::abs(phase::d_bar_1() - (0.5 + std::sqrt(2 * std::sqrt(3.0)) / 4)) <= 1e-12);
  CHECK(std::abs(phase::d_bar_bar_1() - (1 + 14 * std::sqrt(3.0) / 27) / 2) <= 1e-12);
  CHECK(phase::d_tilde_1() < phase::d_tilde_0());
  CHECK(phase::d_tilde_0() < phase::d_bar_1());
  CHECK(phase::d_bar_1() < 1.0);
}

TEST_CASE("g cubic") {
  for (double r : {1.0, 1.5, 3.0, 10.0}) CHECK(g_cubic(1.0, r) == doctest::Approx(-r * r + 2 * r + 1));
  for (double d : {0.5, 0.7, 1.3, 3.0}) CHECK(g_cubic(d, 1.0) == doctest::Approx(2.0));
  CHECK(g_cubic(0.5, 2.0) == doctest::Approx(7.5));
  // Sign criterion for the curvature at rho = 2.
  for (double d : {0.6, 0.95, 1.5}) {
    for (double r : {1.5, 4.0, 9.0, 30.0}) {
      const SecondDerivativeValues v = second_derivative_values(d, r);
      CHECK((v.at_2 < 0) == (g_cubic(d, r) > 0));
    }
  }
}

TEST_CASE("critical curves") {
  CHECK(std::abs(*critical_curves(0.5).r_bar1 - std::pow(2 + std::sqrt(3.0), 2)) <= 1e-10);
  CHECK(std::abs(*critical_curves(1.0).r3 - (1 + std::sqrt(2.0))) <= 1e-10);
  CHECK(!critical_curves(1.0).r_bar1.has_value());
  CHECK(!critical_curves(1.0).r4.has_value());
  CHECK(!critical_curves(0.9).r3.has_value());
  CHECK(critical_curves(0.5).r_tilde1 == doctest::Approx(1.0));
  CHECK(critical_curves(0.8).r_tilde1 == doctest::Approx(1.2 + std::sqrt(4 * 0.36 + 1)));

  const CriticalCurves c0 = critical_curves(phase::d_tilde_0());
  REQUIRE(c0.r_bar1.has_value());
  REQUIRE(c0.r3.has_value());
  CHECK(*c0.r_bar1 == doctest::Approx(c0.r_tilde1).epsilon(1e-9));
  CHECK(*c0.r3 == doctest::Approx(c0.r_tilde1).epsilon(1e-5));

  const CriticalCurves c = critical_curves(0.924);
  REQUIRE(c.r3.has_value());
  REQUIRE(c.r4.has_value());
  CHECK(g_cubic(0.924, *c.r3) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(g_cubic(0.924, *c.r4) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("property: critical curve monotonicity and ordering") {
  double last_bar = INFINITY, last_r3 = INFINITY, last_r4 = 0.0;
  for (double d = 0.5; d <= 1.5; d += 0.0025) {
    const CriticalCurves c = critical_curves(d);
    if (c.r_bar1) {
      CHECK(*c.r_bar1 < last_bar);
      last_bar = *c.r_bar1;
    }
    if (c.r3) {
      CHECK(*c.r3 < last_r3);
      last_r3 = *c.r3;
    }
    if (c.r4) {
      CHECK(*c.r4 > last_r4);
      last_r4 = *c.r4;
    }
    const bool near_triple = std::abs(d - phase::d_tilde_0()) < 1e-3;
    if (!near_triple && d < phase::d_tilde_0() && c.r3) {
      CHECK(c.r_tilde1 < *c.r_bar1);
      CHECK(*c.r_bar1 < *c.r3);
    }
    if (!near_triple && d > phase::d_tilde_0() && c.r4) {
      CHECK(*c.r3 < c.r_tilde1);
      CHECK(c.r_tilde1 < *c.r4);
    }
  }
}

TEST_CASE("classification examples") {
  CHECK(classify_shape(0.5, 10.0).inflexions == 0);
  CHECK(classify_shape(0.5, 10.0).region == ShapeRegion::I);
  CHECK(classify_shape(0.5, 100.0).inflexions == 2);
  const PhasePoint p = classify_shape(3.0, 4.0);
  CHECK(p.inflexions == 1);
  CHECK(p.sign_change);
  CHECK(p.region == ShapeRegion::V);
  CHECK_FALSE(classify_shape(3.0, 1.4).sign_change);
  CHECK(classify_shape(1.0, 3.0).inflexions == 1);
  CHECK(classify_shape(1.0, 3.0).region == ShapeRegion::IV);
  CHECK(to_string(ShapeRegion::III) == "2iii");
}

TEST_CASE("anomalous sweep at d = 0.924") {
  const auto t = sweep(0.924, 3.0, 8.0, 0.001);
  REQUIRE(t.size() == 3);
  CHECK(t[0].from == 0);
  CHECK(t[0].to == 2);
  CHECK(t[1].to == 1);
  CHECK(t[2].to == 2);
  CHECK(std::abs(t[0].r - 4.25) <= 0.1);
  CHECK(std::abs(t[1].r - 4.9) <= 0.1);
  CHECK(std::abs(t[2].r - 5.65) <= 0.1);
  for (double r : {4.0, 4.6, 5.3, 6.0}) {
    CHECK(count_inflexions_numeric(two_lane_curve(0.924, r, 4001)) == classify_shape(0.924, r).inflexions);
  }
}

TEST_CASE("symmetry reductions") {
  for (double d : {0.2, 0.7, 1.6, -0.5}) {
    for (double r : {0.05, 0.3, 2.0, 20.0}) {
      const int count = classify_shape(d, r).inflexions;
      CHECK(classify_shape(1 - d, r).inflexions == count);
      CHECK(classify_shape(d, 1 / r).inflexions == count);
      CHECK(count_inflexions_numeric(two_lane_curve(d, r, 4001)) == count);
    }
  }
}

TEST_CASE("second derivative values") {
  for (double r : {1.5, 4.0, 20.0}) {
    const double expected = -1 + (r + 1) / (4 * std::sqrt(r));
    for (double d : {0.5, 0.8, 2.0}) {
      const SecondDerivativeValues v = second_derivative_values(d, r);
      CHECK(v.at_1 == doctest::Approx(expected).epsilon(1e-12));
      CHECK(v.at_0 == doctest::Approx(curvature_fd(d, r, 1e-3)).epsilon(1e-2).scale(1.0));
      CHECK(v.at_1 == doctest::Approx(curvature_fd(d, r, 1.0)).epsilon(1e-5).scale(1.0));
      REQUIRE(v.rho_tilde0.has_value());
      CHECK(*v.rho_tilde0 == doctest::Approx(1 + (2 * d - 1) * 4 * r / ((r - 1) * (r + 1))));
    }
  }
  const double threshold = std::pow(2 + std::sqrt(3.0), 2);
  CHECK(second_derivative_values(0.7, threshold * 0.99).at_1 < 0);
  CHECK(second_derivative_values(0.7, threshold * 1.01).at_1 > 0);
  const SecondDerivativeValues sym = second_derivative_values(0.5, 7.0);
  CHECK(*sym.rho_tilde0 == doctest::Approx(1.0));
  CHECK(sym.at_0 == doctest::Approx(sym.at_2));
  const SecondDerivativeValues flat = second_derivative_values(0.7, 1.0);
  CHECK(!flat.rho_tilde0.has_value());
  CHECK(flat.at_1 == doctest::Approx(-0.5));
}

TEST_CASE("numerical inflexion counter") {
  CHECK(count_inflexions_numeric(two_lane_curve(0.5, 1.0, 4001)) == 0);
  CHECK(count_inflexions_numeric(two_lane_curve(0.5, 100.0, 4001)) == 2);
  CHECK(count_inflexions_numeric(two_lane_curve(1.0, 3.0, 4001)) == 1);

  // Without a closed form the counter falls back to finite differences of G.
  const EquilibriumManifold m(two_lane_model(0.5, 0.5, 1.0, 100.0));
  FluxCurve generic([&](double x) { return m.flux(x); }, 2.0, 4001);
  CHECK(count_inflexions_numeric(generic) == 2);

  FluxCurve wiggly([](double x) { return std::sin(60 * x); }, 2.0, 101, {}, {},
                   [](double x) { return -3600 * std::sin(60 * x); });
  CHECK_THROWS_AS(count_inflexions_numeric(wiggly), Error);
}

TEST_CASE("inflexion placement for a symmetric double bump") {
  const InflexionPlacement p = inflexion_placement(two_lane_curve(0.5, 100.0, 4001));
  CHECK(p.left_of_one == 1);
  CHECK(p.right_of_one == 1);
}

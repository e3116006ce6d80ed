#include <doctest.h>

#include <cmath>
#include <random>

#include "hydro/equilibrium.hpp"
#include "hydro/error.hpp"
#include "hydro/flux_curve.hpp"
#include "hydro/relaxation.hpp"
#include "hydro/scalar_pde.hpp"
#include "support.hpp"

using namespace hydro;

namespace {

LaneSystemState riemann_lanes(const EquilibriumManifold& m, double alpha, double beta, double dx, double L = 2.0) {
  return manifold_state(m, DensityField::from_function(-L, L, dx, [=](double x) { return x < 0 ? alpha : beta; }));
}

double lane_l1(const LaneSystemState& a, const LaneSystemState& b) {
  return (a.rho - b.rho).cwiseAbs().sum() * a.dx;
}

}  // namespace

TEST_CASE("source term") {
  const ModelSpec two = two_lane_model(0.5, 0.5, 1.0, 1.0);
  Eigen::Vector2d rho(1.0, 0.0);
  const Eigen::VectorXd c = source_term(two, rho);
  CHECK(c(0) == doctest::Approx(-1.0));
  CHECK(c(1) == doctest::Approx(1.0));
  CHECK(source_term(two, Eigen::Vector2d::Zero()).isZero());
  CHECK(source_term(two, Eigen::Vector2d::Ones()).isZero());

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelSpec spec = testing::random_model(rng);
    const EquilibriumManifold m(spec);
    CHECK(source_term(spec, m.point(spec.n * unit(rng))).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, spec.max_rate()));
    Eigen::VectorXd x(spec.n);
    for (int i = 0; i < spec.n; ++i) x(i) = unit(rng);
    CHECK(std::abs(source_term(spec, x).sum()) <= 1e-14 * spec.n * spec.max_rate());
    const Eigen::MatrixXd J = source_jacobian(spec, x);
    const double h = 1e-6;
    for (int j = 0; j < spec.n; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      const Eigen::VectorXd fd = (source_term(spec, xp) - source_term(spec, xm)) / (2 * h);
      CHECK((J.col(j) - fd).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, spec.max_rate()));
    }
  }
}

TEST_CASE("property: source step conserves mass, stays in the box and relaxes to the manifold") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelSpec spec = testing::random_model(rng);
    RelaxationOptions options;
    options.epsilon = 0.01;
    RelaxationSolver solver(spec, options);
    Eigen::VectorXd x(spec.n);
    for (int i = 0; i < spec.n; ++i) x(i) = unit(rng);
    const double mass = x.sum();
    for (int s = 0; s < 10; ++s) {
      const double before = x.sum();
      solver.source_step(x, 0.0025);
      CHECK(std::abs(x.sum() - before) <= 1e-13);
      CHECK(x.minCoeff() >= 0.0);
      CHECK(x.maxCoeff() <= 1.0);
    }
    CHECK(std::abs(x.sum() - mass) <= 1e-12);
    // One-way edges empty their source lane only algebraically in time, so the relaxation runs long.
    for (int s = 0; s < 10; ++s) solver.source_step(x, 100.0);
    CHECK((x - solver.manifold().point(x.sum())).cwiseAbs().maxCoeff() <= 1e-3);
    CHECK(solver.diagnostics().max_conservation_defect <= 1e-13);
    CHECK(solver.diagnostics().box_projections == 0);
  }
}

TEST_CASE("constant manifold state is stationary") {
  const ModelSpec spec = two_lane_model(0.8, 0.2, 0.2, 1.0);
  const EquilibriumManifold m(spec);
  const LaneSystemState s0 = manifold_state(m, DensityField::from_function(-1, 1, 0.05, [](double) { return 1.3; }));
  const auto out = relax_solve(spec, 0.01, s0, 0.5, 0.45, {0.25});
  REQUIRE(out.size() == 2);
  CHECK(out[0].t == doctest::Approx(0.25));
  CHECK(out[1].t == doctest::Approx(0.5));
  CHECK((out[1].rho - s0.rho).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("out-of-box data is rejected") {
  const ModelSpec spec = two_lane_model(0.8, 0.2, 0.2, 1.0);
  LaneSystemState s;
  s.x0 = 0;
  s.dx = 0.1;
  s.rho = LaneMatrix::Constant(10, 2, 1.2);
  CHECK_THROWS_AS(relax_solve(spec, 0.1, s, 0.1, 0.45, {}), Error);
}

TEST_CASE("relaxation approaches the scalar law as epsilon decreases") {
  const ModelSpec spec = two_lane_model(0.8, 0.2, 0.2, 1.0);
  const EquilibriumManifold m(spec);
  const FluxCurve G = tabulate_flux(m, 2001);
  const double dx = 0.02;
  const LaneSystemState s0 = riemann_lanes(m, 1.5, 0.5, dx);
  const DensityField reference = cauchy_solve(G, s0.total(), 0.5);
  double last_total = INFINITY, last_lanes = INFINITY;
  for (double eps : {0.1, 0.01}) {
    const LaneSystemState s = relax_solve(spec, eps, s0, 0.5, 0.45, {}).back();
    const double total = l1_distance(s.total(), reference, {-1.5, 1.5});
    const double lanes = lane_l1(s, manifold_state(m, s.total()));
    CHECK(total < last_total);
    CHECK(lanes < last_lanes);
    last_total = total;
    last_lanes = lanes;
  }
}

TEST_CASE("property: monotone in the initial data") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelSpec spec = testing::random_model(rng, 4);
    LaneSystemState a;
    a.x0 = -1;
    a.dx = 0.05;
    a.rho.resize(40, spec.n);
    for (Eigen::Index k = 0; k < a.rho.size(); ++k) a.rho.data()[k] = 0.8 * unit(rng);
    LaneSystemState b = a;
    for (Eigen::Index k = 0; k < b.rho.size(); ++k) b.rho.data()[k] += 0.2 * unit(rng);
    for (double eps : {1.0, 0.05}) {
      const LaneSystemState ua = relax_solve(spec, eps, a, 0.3, 0.45, {}).back();
      const LaneSystemState ub = relax_solve(spec, eps, b, 0.3, 0.45, {}).back();
      CHECK((ub.rho - ua.rho).minCoeff() >= -1e-12);
    }
  }
}

TEST_CASE("property: L1 stability and total variation bounds") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelSpec spec = testing::random_model(rng, 4);
    const double C = 2.0 * spec.max_rate();
    const double T = 0.3;
    LaneSystemState a;
    a.x0 = -1;
    a.dx = 0.05;
    a.rho.resize(40, spec.n);
    for (Eigen::Index k = 0; k < a.rho.size(); ++k) a.rho.data()[k] = unit(rng);
    LaneSystemState b = a;
    for (Eigen::Index k = 10; k < 30; ++k) b.rho.row(k).setConstant(unit(rng));
    const LaneSystemState ua = relax_solve(spec, 1.0, a, T, 0.45, {}).back();
    const LaneSystemState ub = relax_solve(spec, 1.0, b, T, 0.45, {}).back();
    const double growth = lane_l1(ua, ub) / lane_l1(a, b);
    CHECK(growth <= std::exp(C * T));
    CHECK(total_variation(ua.total()) <= std::exp(C * T) * total_variation(a.total()) + 1e-12);
  }
}

TEST_CASE("entropy residual") {
  const ModelSpec spec = two_lane_model(0.8, 0.2, 0.2, 1.0);
  const EquilibriumManifold m(spec);
  RelaxationOptions options;
  options.epsilon = 0.01;

  SUBCASE("constant manifold state") {
    RelaxationSolver solver(spec, options);
    const LaneSystemState s = manifold_state(m, DensityField::from_function(-1, 1, 0.05, [](double) { return 0.9; }));
    for (double c : {0.3, 0.9, 1.6}) CHECK(entropy_residual(solver, s, c).residual.abs().maxCoeff() <= 1e-10);
  }
  SUBCASE("dissipation across a shock") {
    RelaxationSolver solver(spec, options);
    LaneSystemState s = riemann_lanes(m, 0.5, 1.5, 0.02);
    s = solver.solve(s, 0.2);
    const EntropyResidual e = entropy_residual(solver, s, 1.0);
    CHECK(e.integrated() * s.dx < -1e-4);
    CHECK(e.residual.maxCoeff() * s.dx <= 1e-9);
  }
  SUBCASE("smooth data: residual vanishes under refinement") {
    double previous = INFINITY;
    for (double dx : {0.04, 0.02, 0.01}) {
      RelaxationSolver solver(spec, options);
      const LaneSystemState s = manifold_state(
          m, DensityField::from_function(-1, 1, dx, [](double x) { return 1.0 + 0.3 * std::cos(M_PI * x); }));
      const EntropyResidual e = entropy_residual(solver, s, 1.1);
      const double size = e.residual.abs().sum() * dx;
      CHECK(size < previous);
      previous = size;
    }
  }
  SUBCASE("property: integrated residual is nonpositive on random boxes") {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RelaxationSolver solver(spec, options);
    LaneSystemState s = riemann_lanes(m, 1.7, 0.2, 0.02);
    for (int step = 0; step < 20; ++step) {
      const double c = 2.0 * unit(rng);
      const EntropyResidual e = entropy_residual(solver, s, c);
      const auto lo = static_cast<Eigen::Index>(unit(rng) * (e.residual.size() - 1));
      const auto hi = std::min<Eigen::Index>(e.residual.size(), lo + 1 + static_cast<Eigen::Index>(unit(rng) * 60));
      CHECK(e.residual.segment(lo, hi - lo).sum() * s.dx <= 1e-9);
      s = solver.solve(s, 0.05);
    }
  }
}

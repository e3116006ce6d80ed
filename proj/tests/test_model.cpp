#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "hydro/error.hpp"
#include "hydro/model.hpp"
#include "support.hpp"

using namespace hydro;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigInvalid;
}

ModelSpec raw(int n) {
  ModelSpec s;
  s.n = n;
  s.d = Eigen::VectorXd::Ones(n);
  s.l = Eigen::VectorXd::Zero(n);
  s.q = Eigen::MatrixXd::Zero(n, n);
  return s;
}

// Diameter by Floyd-Warshall, independent of the BFS in the library.
int diameter(const Eigen::MatrixXd& q) {
  const int n = static_cast<int>(q.rows());
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, 1 << 20));
  for (int i = 0; i < n; ++i) {
    dist[i][i] = 0;
    for (int j = 0; j < n; ++j) {
      if (i != j && (q(i, j) > 0 || q(j, i) > 0)) dist[i][j] = 1;
    }
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
  int out = 0;
  for (auto& row : dist)
    for (int v : row) out = std::max(out, v);
  return out;
}

}  // namespace

TEST_CASE("two-lane model has one class with lambda ratio p/q") {
  const ModelSpec spec = two_lane_model(0.7, 0.3, 2.0, 5.0);
  const ClassDecomposition c = irreducibility_classes(spec);
  REQUIRE(c.count() == 1);
  CHECK(c.size(0) == 2);
  CHECK(c.weight(1) / c.weight(0) == doctest::Approx(2.0 / 5.0).epsilon(1e-14));
  CHECK(std::min(c.weight(0), c.weight(1)) == 1.0);
  CHECK(c.tail(-1) == 2);
  CHECK(c.tail(0) == 0);
}

TEST_CASE("one-way chain splits into ordered singleton classes") {
  ModelSpec s = raw(3);
  s.q(0, 1) = 1.0;
  s.q(1, 2) = 1.0;
  const ClassDecomposition c = irreducibility_classes(validate_model(s));
  REQUIRE(c.count() == 3);
  for (int a = 0; a < 3; ++a) {
    REQUIRE(c.size(a) == 1);
    CHECK(c.classes[a][0] == a);
    CHECK(c.lambda[a](0) == 1.0);
  }
  CHECK(c.tail(0) == 2);
  CHECK(c.tail(1) == 1);
  CHECK(c.tail(2) == 0);
}

TEST_CASE("bidirectional chain has geometric weights") {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(5);
  const ModelSpec spec = chain_model(d, 3.0, 1.5);
  const ClassDecomposition c = irreducibility_classes(spec);
  REQUIRE(c.count() == 1);
  for (int i = 0; i < 5; ++i) CHECK(c.weight(i) == doctest::Approx(std::pow(2.0, i)).epsilon(1e-13));
}

TEST_CASE("chain with zero downward rate gives singleton classes") {
  const ModelSpec spec = chain_model(Eigen::VectorXd::Ones(4), 1.0, 0.0);
  const ClassDecomposition c = irreducibility_classes(spec);
  CHECK(c.count() == 4);
}

TEST_CASE("three-lane cycle condition") {
  // Kolmogorov: q01 q12 q20 = q02 q21 q10.
  auto cycle = [](double t) {
    ModelSpec s = raw(3);
    s.q(0, 1) = 1.0;
    s.q(1, 0) = 2.0;
    s.q(1, 2) = 3.0;
    s.q(2, 1) = 1.0;
    s.q(2, 0) = t;
    s.q(0, 2) = 1.0;
    return s;
  };
  CHECK_NOTHROW(validate_model(cycle(2.0 / 3.0)));
  CHECK(code_of([&] { validate_model(cycle(1.0)); }) == ErrorCode::NoReversibleMeasure);
}

TEST_CASE("validation rejects violated assumptions") {
  ModelSpec zero = two_lane_model(1.0, 1.0, 1.0, 1.0);
  zero.d(1) = 0.0;
  CHECK(code_of([&] { validate_model(zero); }) == ErrorCode::ZeroLaneRate);

  ModelSpec split = raw(3);
  split.q(0, 1) = split.q(1, 0) = 1.0;
  CHECK(code_of([&] { validate_model(split); }) == ErrorCode::NotWeaklyIrreducible);

  ModelSpec one_way_loop = raw(2);
  one_way_loop.q(0, 1) = 1.0;
  CHECK_NOTHROW(validate_model(one_way_loop));

  ModelSpec negative = raw(2);
  negative.q(0, 1) = -1.0;
  negative.q(1, 0) = 1.0;
  CHECK_THROWS_AS(validate_model(negative), Error);
}

TEST_CASE("coupling exponents") {
  CHECK(coupling_exponents(two_lane_model(1, 1, 1, 1)).n_star == 1);
  CHECK(coupling_exponents(two_lane_model(1, 1, 1, 1)).m_star == 1);

  const CouplingExponents chain = coupling_exponents(chain_model(Eigen::VectorXd::Ones(3), 1.0, 1.0));
  CHECK(chain.n_star == 2);
  CHECK(chain.m_star == 2);

  ModelSpec complete = raw(5);
  complete.q = Eigen::MatrixXd::Ones(5, 5) - Eigen::MatrixXd::Identity(5, 5);
  const CouplingExponents c = coupling_exponents(validate_model(complete));
  CHECK(c.n_star == 1);
  CHECK(c.m_star == 1);

  // floor(n/2)(n - 1 - floor(n/2)) + n
  const int expected[] = {0, 1, 2, 4, 6, 9, 12};
  for (int n = 1; n <= 6; ++n) CHECK(m_star_from_diameter(n) == expected[n]);
}

TEST_CASE("theta schedule") {
  CHECK(theta_schedule(1000, ThetaMode::linear(), 1) == 1000);
  CHECK(theta_schedule(10000, ThetaMode::power(0.5), 1) == 100);
  CHECK(theta_schedule(1000, ThetaMode::power(1.0), 3) == 1000);
  CHECK(code_of([] { theta_schedule(1000, ThetaMode::power(0.4), 2); }) == ErrorCode::ExponentTooSmall);
  CHECK(code_of([] { theta_schedule(1000, ThetaMode::power(0.5), 2); }) == ErrorCode::ExponentTooSmall);
  CHECK(theta_schedule(1000, ThetaMode::power(0.51), 2) == static_cast<std::int64_t>(std::ceil(std::pow(1000, 0.51))));

  ModelSpec chain = chain_model(Eigen::VectorXd::Ones(3), 1.0, 1.0);
  chain.theta = ThetaMode::power(0.4);
  CHECK(code_of([&] { validate_model(chain); }) == ErrorCode::ExponentTooSmall);
}

TEST_CASE("property: reversibility of class weights on random models") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const ModelSpec spec = testing::random_model(rng);
    const ClassDecomposition c = irreducibility_classes(spec);
    std::set<int> seen;
    for (int a = 0; a < c.count(); ++a) {
      double min_weight = 1e300;
      for (int i : c.classes[a]) {
        CHECK(seen.insert(i).second);
        min_weight = std::min(min_weight, c.weight(i));
        for (int j : c.classes[a]) {
          CHECK(std::abs(c.weight(i) * spec.q(i, j) - c.weight(j) * spec.q(j, i)) <= 1e-12 * spec.max_rate());
        }
      }
      CHECK(min_weight == doctest::Approx(1.0).epsilon(1e-15));
      if (a + 1 < c.count()) {
        bool linked = false;
        for (int i : c.classes[a])
          for (int j : c.classes[a + 1]) linked = linked || spec.q(i, j) > 0.0;
        CHECK(linked);
      }
    }
    CHECK(static_cast<int>(seen.size()) == spec.n);
  }
}

TEST_CASE("property: class partition is invariant under relabeling") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelSpec spec = testing::random_model(rng);
    std::vector<int> perm(spec.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ModelSpec relabeled = spec;
    for (int i = 0; i < spec.n; ++i) {
      relabeled.d(perm[i]) = spec.d(i);
      relabeled.l(perm[i]) = spec.l(i);
      for (int j = 0; j < spec.n; ++j) relabeled.q(perm[i], perm[j]) = spec.q(i, j);
    }
    const ClassDecomposition a = irreducibility_classes(spec);
    const ClassDecomposition b = irreducibility_classes(validate_model(relabeled));
    REQUIRE(a.count() == b.count());
    for (int k = 0; k < a.count(); ++k) {
      std::set<int> mapped;
      for (int i : a.classes[k]) mapped.insert(perm[i]);
      CHECK(mapped == std::set<int>(b.classes[k].begin(), b.classes[k].end()));
      for (int i : a.classes[k]) CHECK(b.weight(perm[i]) == doctest::Approx(a.weight(i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: m* does not grow when edges are added") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> lanes(2, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = lanes(rng);
    ModelSpec s = raw(n);
    for (int i = 0; i + 1 < n; ++i) s.q(i, i + 1) = s.q(i + 1, i) = 1.0;
    int previous = coupling_exponents(validate_model(s)).m_star;
    CHECK(coupling_exponents(s).n_star == diameter(s.q));
    std::uniform_int_distribution<int> lane(0, n - 1);
    for (int step = 0; step < n; ++step) {
      const int i = lane(rng), j = lane(rng);
      if (i == j) continue;
      s.q(i, j) = s.q(j, i) = 1.0;
      const CouplingExponents c = coupling_exponents(validate_model(s));
      CHECK(c.n_star == diameter(s.q));
      CHECK(c.m_star <= previous);
      previous = c.m_star;
    }
  }
}

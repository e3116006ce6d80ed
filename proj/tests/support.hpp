#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "hydro/model.hpp"

namespace hydro::testing {

// Random reversible model: lanes are split into ordered blocks, each block is
// connected by two-way edges with q(i,j) = c_ij / lambda_i, and one-way edges
// only run from earlier blocks to later ones. Lane labels are then shuffled.
inline ModelSpec random_model(std::mt19937_64& rng, int max_lanes = 6) {
  std::uniform_int_distribution<int> lanes(1, max_lanes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = lanes(rng);
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);
  std::shuffle(label.begin(), label.end(), rng);

  std::vector<int> block(n, 0);
  for (int k = 1; k < n; ++k) block[k] = block[k - 1] + (unit(rng) < 0.4 ? 1 : 0);

  Eigen::VectorXd potential(n);
  for (int k = 0; k < n; ++k) potential(k) = std::exp(3.0 * (unit(rng) - 0.5));

  ModelSpec spec;
  spec.n = n;
  spec.d.resize(n);
  spec.l.resize(n);
  spec.q = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    spec.d(label[k]) = 2.0 * unit(rng);
    spec.l(label[k]) = unit(rng) < 0.3 ? 0.0 : unit(rng);
    if (spec.d(label[k]) + spec.l(label[k]) < 0.05) spec.d(label[k]) += 0.5;
  }
  auto two_way = [&](int a, int b) {
    const double c = 0.1 + 2.0 * unit(rng);
    spec.q(label[a], label[b]) = c / potential(a);
    spec.q(label[b], label[a]) = c / potential(b);
  };
  for (int k = 1; k < n; ++k) {
    if (block[k] == block[k - 1]) {
      int first = k - 1;
      while (first > 0 && block[first - 1] == block[k]) --first;
      std::uniform_int_distribution<int> pick(first, k - 1);
      two_way(pick(rng), k);
    } else {
      spec.q(label[k - 1], label[k]) = 0.1 + unit(rng);
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (unit(rng) > 0.25 || spec.q(label[a], label[b]) > 0.0 || spec.q(label[b], label[a]) > 0.0) continue;
      if (block[a] == block[b]) {
        two_way(a, b);
      } else {
        spec.q(label[a], label[b]) = 0.1 + unit(rng);
      }
    }
  }
  return validate_model(spec);
}

}  // namespace hydro::testing

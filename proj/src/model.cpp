#include "hydro/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

namespace hydro {

namespace {

constexpr double kCycleTolerance = 1e-9;

using Reach = std::vector<std::vector<char>>;

Reach reachability(const Eigen::MatrixXd& q) {
  const int n = static_cast<int>(q.rows());
  Reach reach(n, std::vector<char>(n, 0));
  for (int s = 0; s < n; ++s) {
    std::deque<int> queue{s};
    reach[s][s] = 1;
    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      for (int j = 0; j < n; ++j) {
        if (q(i, j) > 0.0 && !reach[s][j]) {
          reach[s][j] = 1;
          queue.push_back(j);
        }
      }
    }
  }
  return reach;
}

std::vector<std::vector<int>> ordered_classes(const Eigen::MatrixXd& q, const Reach& reach) {
  const int n = static_cast<int>(q.rows());
  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> classes;
  for (int i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    std::vector<int> members;
    for (int j = i; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) {
        label[j] = static_cast<int>(classes.size());
        members.push_back(j);
      }
    }
    classes.push_back(std::move(members));
  }
  // Under weak irreducibility the condensation is a chain, so the number of
  // lanes reachable from a class strictly decreases along the order.
  auto reach_count = [&](const std::vector<int>& c) {
    return std::count(reach[c.front()].begin(), reach[c.front()].end(), char{1});
  };
  std::stable_sort(classes.begin(), classes.end(),
                   [&](const auto& a, const auto& b) { return reach_count(a) > reach_count(b); });
  return classes;
}

// Spanning-tree weights inside one class, followed by a check of every edge.
Eigen::VectorXd class_weights(const Eigen::MatrixXd& q, const std::vector<int>& members) {
  const int k = static_cast<int>(members.size());
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
  std::vector<char> seen(k, 0);
  lambda(0) = 1.0;
  seen[0] = 1;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop_front();
    for (int b = 0; b < k; ++b) {
      const int i = members[a], j = members[b];
      if (seen[b] || q(i, j) <= 0.0) continue;
      if (q(j, i) <= 0.0) {
        std::ostringstream msg;
        msg << "edge " << i << "->" << j << " has no reverse inside its class";
        throw Error(ErrorCode::NoReversibleMeasure, msg.str());
      }
      lambda(b) = lambda(a) * q(i, j) / q(j, i);
      seen[b] = 1;
      queue.push_back(b);
    }
  }
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const int i = members[a], j = members[b];
      const double forward = lambda(a) * q(i, j);
      const double backward = lambda(b) * q(j, i);
      const double scale = std::max(forward, backward);
      if (scale > 0.0 && std::abs(forward - backward) > kCycleTolerance * scale) {
        std::ostringstream msg;
        msg << "cycle condition fails on edge " << i << "<->" << j;
        throw Error(ErrorCode::NoReversibleMeasure, msg.str());
      }
    }
  }
  return lambda / lambda.minCoeff();
}

}  // namespace

double ModelSpec::max_rate() const {
  double m = 0.0;
  if (n > 0) m = std::max(d.maxCoeff(), l.maxCoeff());
  if (q.size() > 0) m = std::max(m, q.maxCoeff());
  return m;
}

int ClassDecomposition::tail(int alpha) const {
  int total = 0;
  for (int beta = alpha + 1; beta < count(); ++beta) total += size(beta);
  return total;
}

ModelSpec validate_model(ModelSpec raw) {
  if (raw.n < 1) throw Error(ErrorCode::ModelInvalid, "lane count must be at least 1");
  if (raw.d.size() != raw.n || raw.l.size() != raw.n || raw.q.rows() != raw.n || raw.q.cols() != raw.n) {
    throw Error(ErrorCode::ModelInvalid, "rate arrays do not match the lane count");
  }
  auto bad = [](double x) { return !std::isfinite(x) || x < 0.0; };
  for (int i = 0; i < raw.n; ++i) {
    if (bad(raw.d(i)) || bad(raw.l(i))) throw Error(ErrorCode::ModelInvalid, "negative or non-finite jump rate");
    for (int j = 0; j < raw.n; ++j) {
      if (bad(raw.q(i, j))) throw Error(ErrorCode::ModelInvalid, "negative or non-finite interlane rate");
    }
    raw.q(i, i) = 0.0;
  }
  for (int i = 0; i < raw.n; ++i) {
    if (raw.d(i) + raw.l(i) <= 0.0) {
      throw Error(ErrorCode::ZeroLaneRate, "lane " + std::to_string(i) + " has d+l = 0");
    }
  }
  const Reach reach = reachability(raw.q);
  for (int i = 0; i < raw.n; ++i) {
    for (int j = i + 1; j < raw.n; ++j) {
      if (!reach[i][j] && !reach[j][i]) {
        std::ostringstream msg;
        msg << "lanes " << i << " and " << j << " are not connected in either direction";
        throw Error(ErrorCode::NotWeaklyIrreducible, msg.str());
      }
    }
  }
  for (const auto& members : ordered_classes(raw.q, reach)) class_weights(raw.q, members);
  if (raw.theta.kind == ThetaMode::Kind::Power) {
    theta_schedule(1, raw.theta, coupling_exponents(raw).m_star);
  }
  return raw;
}

ClassDecomposition irreducibility_classes(const ModelSpec& spec) {
  ClassDecomposition out;
  out.classes = ordered_classes(spec.q, reachability(spec.q));
  out.class_of.assign(spec.n, -1);
  out.index_in_class.assign(spec.n, -1);
  for (int alpha = 0; alpha < out.count(); ++alpha) {
    const auto& members = out.classes[alpha];
    for (int k = 0; k < static_cast<int>(members.size()); ++k) {
      out.class_of[members[k]] = alpha;
      out.index_in_class[members[k]] = k;
    }
    out.lambda.push_back(class_weights(spec.q, members));
  }
  return out;
}

int m_star_from_diameter(int n_star) {
  const int h = n_star / 2;
  return h * (n_star - 1 - h) + n_star;
}

CouplingExponents coupling_exponents(const ModelSpec& spec) {
  const int n = spec.n;
  int diameter = 0;
  for (int s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    dist[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      for (int j = 0; j < n; ++j) {
        if (dist[j] < 0 && (spec.q(i, j) > 0.0 || spec.q(j, i) > 0.0)) {
          dist[j] = dist[i] + 1;
          queue.push_back(j);
        }
      }
    }
    diameter = std::max(diameter, *std::max_element(dist.begin(), dist.end()));
  }
  return {diameter, m_star_from_diameter(diameter)};
}

std::int64_t theta_schedule(std::int64_t N, const ThetaMode& mode, int m_star) {
  if (N < 1) throw Error(ErrorCode::ConfigInvalid, "scale N must be at least 1");
  if (mode.kind == ThetaMode::Kind::Linear) return N;
  const double a = mode.exponent;
  if (!(a <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "power exponent must not exceed 1");
  const double floor_a = m_star >= 1 ? 1.0 - 1.0 / m_star : 0.0;
  if (a <= floor_a) {
    std::ostringstream msg;
    msg << "exponent " << a << " <= 1 - 1/m* = " << floor_a;
    throw Error(ErrorCode::ExponentTooSmall, msg.str());
  }
  return static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(N), a) - 1e-9));
}

ModelSpec two_lane_model(double d0, double d1, double p, double q, double l0, double l1) {
  ModelSpec m;
  m.n = 2;
  m.d = Eigen::Vector2d(d0, d1);
  m.l = Eigen::Vector2d(l0, l1);
  m.q = Eigen::Matrix2d::Zero();
  m.q(0, 1) = p;
  m.q(1, 0) = q;
  return validate_model(m);
}

ModelSpec chain_model(const Eigen::VectorXd& d, double up, double down) {
  ModelSpec m;
  m.n = static_cast<int>(d.size());
  m.d = d;
  m.l = Eigen::VectorXd::Zero(m.n);
  m.q = Eigen::MatrixXd::Zero(m.n, m.n);
  for (int i = 0; i + 1 < m.n; ++i) {
    m.q(i, i + 1) = up;
    m.q(i + 1, i) = down;
  }
  return validate_model(m);
}

}  // namespace hydro

#include "hydro/equilibrium.hpp"

#include <algorithm>
#include <sstream>

namespace hydro {

namespace {

constexpr int kBisectionCap = 200;
constexpr double kRangeSlack = 1e-12;

}  // namespace

EquilibriumManifold::EquilibriumManifold(const ModelSpec& spec, double tolerance)
    : spec_(spec),
      classes_(irreducibility_classes(spec)),
      gamma_(spec.drift()),
      n_(spec.n),
      tolerance_(tolerance) {}

void EquilibriumManifold::check_range(double rho) const {
  if (!(rho >= -kRangeSlack && rho <= n_ + kRangeSlack)) {
    std::ostringstream msg;
    msg << "total density " << rho << " outside [0, " << n_ << "]";
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
}

double EquilibriumManifold::solve_t(int alpha, double target) const {
  const Eigen::ArrayXd lambda = classes_.lambda[alpha].array();
  const double size = static_cast<double>(lambda.size());
  if (target <= 0.0) return 0.0;
  if (target >= size) return 1.0;
  double lo = 0.0, hi = 1.0;
  double best_t = 0.0, best_err = target;
  for (int it = 0; it < kBisectionCap; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double s = rho_alpha_t(lambda, mid).sum();
    const double err = std::abs(s - target);
    if (err < best_err) {
      best_err = err;
      best_t = mid;
    }
    if (err <= tolerance_) break;
    (s < target ? lo : hi) = mid;
  }
  return best_t;
}

EquilibriumManifold::Location EquilibriumManifold::locate(double rho) const {
  const int m = classes_.count();
  for (int alpha = m - 1; alpha >= 0; --alpha) {
    const double lower = classes_.tail(alpha);
    const double upper = lower + classes_.size(alpha);
    if (rho <= upper || alpha == 0) return {alpha, solve_t(alpha, rho - lower)};
  }
  return {0, 0.0};
}

Eigen::VectorXd EquilibriumManifold::fill(const Location& loc) const {
  Eigen::VectorXd out(n_);
  for (int i = 0; i < n_; ++i) {
    const int beta = classes_.class_of[i];
    if (beta > loc.alpha) {
      out(i) = 1.0;
    } else if (beta < loc.alpha) {
      out(i) = 0.0;
    } else {
      const double lambda = classes_.weight(i);
      out(i) = loc.t * lambda / (1.0 - loc.t + loc.t * lambda);
    }
  }
  return out;
}

Eigen::VectorXd EquilibriumManifold::point(double rho) const {
  check_range(rho);
  rho = std::clamp(rho, 0.0, static_cast<double>(n_));
  return fill(locate(rho));
}

Eigen::VectorXd EquilibriumManifold::class_derivative(int alpha, double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  const auto& members = classes_.classes[alpha];
  const Eigen::ArrayXd lambda = classes_.lambda[alpha].array();
  const Eigen::ArrayXd w = lambda / (1.0 - t + t * lambda).square();
  const double total = w.sum();
  for (std::size_t k = 0; k < members.size(); ++k) out(members[k]) = w(k) / total;
  return out;
}

OneSidedVector EquilibriumManifold::derivative(double rho) const {
  check_range(rho);
  rho = std::clamp(rho, 0.0, static_cast<double>(n_));
  const int m = classes_.count();
  for (int alpha = m - 1; alpha >= 0; --alpha) {
    const double lower = classes_.tail(alpha);
    const double upper = lower + classes_.size(alpha);
    if (rho == lower) {
      Eigen::VectorXd right = class_derivative(alpha, 0.0);
      Eigen::VectorXd left = alpha + 1 < m ? class_derivative(alpha + 1, 1.0) : right;
      return {left, right};
    }
    if (rho < upper || alpha == 0) {
      if (rho >= upper) {
        Eigen::VectorXd left = class_derivative(alpha, 1.0);
        return {left, left};
      }
      Eigen::VectorXd inner = class_derivative(alpha, solve_t(alpha, rho - lower));
      return {inner, inner};
    }
  }
  return {};
}

double EquilibriumManifold::flux_slope(const Eigen::VectorXd& rho, const Eigen::VectorXd& drho) const {
  return (gamma_.array() * (1.0 - 2.0 * rho.array()) * drho.array()).sum();
}

double EquilibriumManifold::flux(double rho) const {
  const Eigen::VectorXd p = point(rho);
  return (gamma_.array() * p.array() * (1.0 - p.array())).sum();
}

OneSidedScalar EquilibriumManifold::flux_derivative(double rho) const {
  const Eigen::VectorXd p = point(rho);
  const OneSidedVector dp = derivative(rho);
  return {flux_slope(p, dp.left), flux_slope(p, dp.right)};
}

double EquilibriumManifold::flux_second_derivative(double rho) const {
  check_range(rho);
  rho = std::clamp(rho, 0.0, static_cast<double>(n_));
  Location loc = locate(rho);
  if (rho == classes_.tail(loc.alpha) + classes_.size(loc.alpha) && loc.alpha > 0) loc = {loc.alpha - 1, 0.0};
  const auto& members = classes_.classes[loc.alpha];
  const Eigen::ArrayXd lambda = classes_.lambda[loc.alpha].array();
  const double t = loc.t;
  const Eigen::ArrayXd den = 1.0 - t + t * lambda;
  const Eigen::ArrayXd w = lambda / den.square();
  const Eigen::ArrayXd dw = -2.0 * lambda * (lambda - 1.0) / den.cube();
  const double W = w.sum(), dW = dw.sum();
  const Eigen::ArrayXd first = w / W;
  const Eigen::ArrayXd second = (dw * W - w * dW) / (W * W * W);
  const Eigen::ArrayXd value = t * lambda / den;
  double out = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const double g = gamma_(members[k]);
    out += g * ((1.0 - 2.0 * value(k)) * second(k) - 2.0 * first(k) * first(k));
  }
  return out;
}

Eigen::VectorXd manifold_point(const EquilibriumManifold& manifold, double rho) { return manifold.point(rho); }

OneSidedVector manifold_derivative(const EquilibriumManifold& manifold, double rho) {
  return manifold.derivative(rho);
}

double flux_G(const EquilibriumManifold& manifold, double rho) { return manifold.flux(rho); }

double two_lane_phi(double r, double rho) {
  const double k = (r - 1.0) / (r + 1.0);
  const double psi = 1.0 + k * k * rho * (rho - 2.0);
  return 0.5 * k * rho * (2.0 - rho) / (1.0 + std::sqrt(std::max(psi, 0.0)));
}

double two_lane_flux(double gamma0, double gamma1, double r, double rho) {
  if (std::isinf(r)) {
    return rho <= 1.0 ? gamma0 * rho * (1.0 - rho) : gamma1 * (rho - 1.0) * (2.0 - rho);
  }
  if (r == 0.0) {
    return rho <= 1.0 ? gamma1 * rho * (1.0 - rho) : gamma0 * (rho - 1.0) * (2.0 - rho);
  }
  const double phi = two_lane_phi(r, rho);
  const double s = gamma0 + gamma1;
  return s * 0.5 * rho * (1.0 - 0.5 * rho) + (gamma0 - gamma1) * (1.0 - rho) * phi - s * phi * phi;
}

double two_lane_phi_slope(double r, double rho) {
  const double k = (r - 1.0) / (r + 1.0);
  const double psi = 1.0 + k * k * rho * (rho - 2.0);
  return -0.5 * k * (rho - 1.0) / std::sqrt(psi);
}

double two_lane_phi_curvature(double r, double rho) {
  const double k = (r - 1.0) / (r + 1.0);
  const double psi = 1.0 + k * k * rho * (rho - 2.0);
  return -2.0 * r * (r - 1.0) / ((r + 1.0) * (r + 1.0) * (r + 1.0)) / (psi * std::sqrt(psi));
}

double two_lane_flux_slope(double gamma0, double gamma1, double r, double rho, bool right_side) {
  if (std::isinf(r) || r == 0.0) {
    const double lower = std::isinf(r) ? gamma0 : gamma1;
    const double higher = std::isinf(r) ? gamma1 : gamma0;
    const bool first = rho < 1.0 || (rho == 1.0 && !right_side);
    return first ? lower * (1.0 - 2.0 * rho) : higher * (3.0 - 2.0 * rho);
  }
  const double s = gamma0 + gamma1, e = gamma0 - gamma1;
  const double phi = two_lane_phi(r, rho), dphi = two_lane_phi_slope(r, rho);
  return s * (0.5 - 0.5 * rho) + e * (-phi + (1.0 - rho) * dphi) - 2.0 * s * phi * dphi;
}

double two_lane_flux_curvature(double gamma0, double gamma1, double r, double rho) {
  if (std::isinf(r) || r == 0.0) {
    const bool first = rho < 1.0;
    const double g = (std::isinf(r) == first) ? gamma0 : gamma1;
    return -2.0 * g;
  }
  const double s = gamma0 + gamma1, e = gamma0 - gamma1;
  const double phi = two_lane_phi(r, rho), dphi = two_lane_phi_slope(r, rho);
  const double ddphi = two_lane_phi_curvature(r, rho);
  return -0.5 * s + e * (-2.0 * dphi + (1.0 - rho) * ddphi) - 2.0 * s * (dphi * dphi + phi * ddphi);
}

}  // namespace hydro

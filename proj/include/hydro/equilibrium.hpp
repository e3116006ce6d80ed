#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "hydro/model.hpp"

namespace hydro {

// phi_r(rho) = r rho / (1 - rho + r rho).
template <typename Scalar>
Scalar phi_r(Scalar r, Scalar rho) {
  return r * rho / (Scalar(1) - rho + r * rho);
}

// rho^{alpha,c}_i = c lambda_i / (1 + c lambda_i); c = +inf gives all ones.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> rho_alpha_c(const Eigen::ArrayBase<Derived>& lambda,
                                                                    typename Derived::Scalar c) {
  using Scalar = typename Derived::Scalar;
  using Out = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  if (std::isinf(c)) return Out::Ones(lambda.size());
  return (c * lambda) / (Scalar(1) + c * lambda);
}

// Compactified form in t = c/(1+c): rho_i = t lambda_i / (1 - t + t lambda_i).
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> rho_alpha_t(const Eigen::ArrayBase<Derived>& lambda,
                                                                    typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  return (t * lambda) / (Scalar(1) - t + t * lambda);
}

struct OneSidedVector {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
};

struct OneSidedScalar {
  double left = 0.0;
  double right = 0.0;
};

class EquilibriumManifold {
 public:
  explicit EquilibriumManifold(const ModelSpec& spec, double tolerance = 1e-14);

  int lanes() const { return n_; }
  const ModelSpec& model() const { return spec_; }
  const ClassDecomposition& decomposition() const { return classes_; }
  const Eigen::VectorXd& drift() const { return gamma_; }
  double tolerance() const { return tolerance_; }

  Eigen::VectorXd point(double rho) const;
  OneSidedVector derivative(double rho) const;
  double flux(double rho) const;
  OneSidedScalar flux_derivative(double rho) const;
  // Second derivative inside a class interval; one-sided limits are taken from the right at boundaries.
  double flux_second_derivative(double rho) const;

 private:
  struct Location {
    int alpha;
    double t;
  };

  void check_range(double rho) const;
  Location locate(double rho) const;
  double solve_t(int alpha, double target) const;
  Eigen::VectorXd fill(const Location& loc) const;
  Eigen::VectorXd class_derivative(int alpha, double t) const;
  double flux_slope(const Eigen::VectorXd& rho, const Eigen::VectorXd& drho) const;

  ModelSpec spec_;
  ClassDecomposition classes_;
  Eigen::VectorXd gamma_;
  int n_;
  double tolerance_;
};

Eigen::VectorXd manifold_point(const EquilibriumManifold& manifold, double rho);
OneSidedVector manifold_derivative(const EquilibriumManifold& manifold, double rho);
double flux_G(const EquilibriumManifold& manifold, double rho);

// Two-lane closed form with gamma0 = d, gamma1 = one_minus_d and r = q(1,0)/q(0,1) in [0, inf].
double two_lane_flux(double gamma0, double gamma1, double r, double rho);
// Derivative of two_lane_flux; right_side selects the one-sided value at the kink of r in {0, inf}.
double two_lane_flux_slope(double gamma0, double gamma1, double r, double rho, bool right_side = true);
double two_lane_flux_curvature(double gamma0, double gamma1, double r, double rho);
// phi(rho) = rho~_0 - rho/2 for the two-lane model with finite positive r.
double two_lane_phi(double r, double rho);
double two_lane_phi_slope(double r, double rho);
double two_lane_phi_curvature(double r, double rho);

}  // namespace hydro

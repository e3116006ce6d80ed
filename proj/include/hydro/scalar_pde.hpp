#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "hydro/flux_curve.hpp"

namespace hydro {

struct DensityField {
  double x0 = 0.0;
  double dx = 1.0;
  double t = 0.0;
  Eigen::ArrayXd values;

  Eigen::Index cells() const { return values.size(); }
  double center(Eigen::Index k) const { return x0 + (static_cast<double>(k) + 0.5) * dx; }
  double x_end() const { return x0 + static_cast<double>(values.size()) * dx; }
  double mass() const { return dx * values.sum(); }

  static DensityField from_function(double x0, double x1, double dx, const std::function<double(double)>& u);
  // Exact cell averages of u estimated with `samples` midpoint sub-samples per cell.
  static DensityField cell_averages(double x0, double x1, double dx, const std::function<double(double)>& u,
                                    int samples);
};

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

struct OneSidedValue {
  double minus = 0.0;
  double plus = 0.0;
};

// Self-similar Riemann solution for data (alpha, beta); sample at v = x/t.
class RiemannProblem {
 public:
  // The flux is referenced, not copied, so it must outlive the problem.
  RiemannProblem(const FluxCurve& flux, double alpha, double beta);
  RiemannProblem(FluxCurve&&, double, double) = delete;

  OneSidedValue operator()(double v) const;
  OneSidedValue at(double x, double t) const { return (*this)(x / t); }
  // Single-valued profile u(x, t), using the mean of the one-sided values at ties.
  double value(double x, double t) const;

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  double refine(double lo, double hi, double v) const;
  double objective(double rho, double v) const;

  const FluxCurve* flux_;
  double alpha_, beta_, lo_, hi_, h_;
  bool decreasing_;
  std::vector<double> rho_, G_;
};

struct RiemannSolution {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> v, u_minus, u_plus;
};

OneSidedValue riemann_solve(const FluxCurve& flux, double alpha, double beta, double v);
RiemannSolution riemann_profile(const FluxCurve& flux, double alpha, double beta, const std::vector<double>& v_grid);

double godunov_flux(const FluxCurve& flux, double uL, double uR);

struct CauchyOptions {
  double cfl = 0.45;
  // Snapshot callback invoked after every step.
  std::function<void(const DensityField&)> on_step;
};

DensityField cauchy_solve(const FluxCurve& flux, DensityField u0, double T, const CauchyOptions& options = {});
DensityField cauchy_solve(const FluxCurve& flux, DensityField u0, double T, double cfl);

// Piecewise-constant projection of b onto the grid of a before comparison.
double l1_distance(const DensityField& a, const DensityField& b, const Window& window);
double linf_distance(const DensityField& a, const DensityField& b, const Window& window);
double total_variation(const DensityField& a);

}  // namespace hydro

#include "hydro/manylane.hpp"

#include <algorithm>
#include <cmath>

#include "hydro/error.hpp"

namespace hydro {

namespace {

constexpr double kJumpTolerance = 1e-6;
constexpr int kTargetPoints = 4001;

}  // namespace

double HillFluxFamily::rate(int i) const { return 4.0 * n * F(static_cast<double>(i) / n); }

double HillFluxFamily::operator()(double u) const { return normalized_flux(n, F, u); }

double HillFluxFamily::unnormalized(double rho) const { return n * normalized_flux(n, F, rho / n); }

double normalized_flux(int n, const TargetFlux& F, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::OutOfRange, "normalized density outside [0, 1]");
  const double x = n * u;
  const int i = std::min(static_cast<int>(std::floor(x)), n - 1);
  return 4.0 * F(static_cast<double>(i) / n) * (x - i) * (i + 1 - x);
}

FluxCurve normalized_flux_curve(int n, const TargetFlux& F, int points_per_hill) {
  const std::size_t points = static_cast<std::size_t>(n) * static_cast<std::size_t>(points_per_hill) + 1;
  return FluxCurve([n, F](double u) { return normalized_flux(n, F, u); }, 1.0, points);
}

ManylaneStudy manylane_riemann_study(const TargetFlux& F, double alpha, double beta, const std::vector<int>& n_list,
                                     const std::vector<double>& v_grid) {
  ManylaneStudy out;
  out.alpha = alpha;
  out.beta = beta;
  std::vector<double> lo(v_grid.size()), hi(v_grid.size());
  if (alpha > beta) {
    const FluxCurve target(F, 1.0, kTargetPoints);
    const RiemannProblem limit(target, alpha, beta);
    double previous = alpha;
    for (std::size_t k = 0; k < v_grid.size(); ++k) {
      const OneSidedValue u = limit(v_grid[k]);
      lo[k] = std::min(u.minus, u.plus);
      hi[k] = std::max(u.minus, u.plus);
      if (hi[k] - lo[k] > kJumpTolerance) out.jumps.push_back(v_grid[k]);
      if (k > 0 && std::abs(u.minus - previous) > 0.05) out.jumps.push_back(0.5 * (v_grid[k] + v_grid[k - 1]));
      previous = u.plus;
    }
  } else {
    for (std::size_t k = 0; k < v_grid.size(); ++k) {
      const double v = v_grid[k];
      lo[k] = v < 0.0 ? alpha : (v > 0.0 ? beta : std::min(alpha, beta));
      hi[k] = v < 0.0 ? alpha : (v > 0.0 ? beta : std::max(alpha, beta));
    }
    if (alpha != beta) out.jumps.push_back(0.0);
  }

  for (int n : n_list) {
    const FluxCurve flux = normalized_flux_curve(n, F);
    const RiemannProblem problem(flux, alpha, beta);
    ManylaneRow row;
    row.n = n;
    row.exclusion_radius = 4.0 / n;
    for (std::size_t k = 0; k < v_grid.size(); ++k) {
      const double v = v_grid[k];
      const bool near_jump = std::any_of(out.jumps.begin(), out.jumps.end(),
                                         [&](double j) { return std::abs(v - j) <= row.exclusion_radius; });
      if (near_jump) continue;
      const OneSidedValue u = problem(v);
      for (double value : {u.minus, u.plus}) {
        const double dist = value < lo[k] ? lo[k] - value : (value > hi[k] ? value - hi[k] : 0.0);
        row.sup_distance = std::max(row.sup_distance, dist);
      }
      ++row.points_used;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace hydro

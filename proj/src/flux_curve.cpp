#include "hydro/flux_curve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>

#include "hydro/equilibrium.hpp"
#include "hydro/error.hpp"

namespace hydro {

FluxCurve::FluxCurve(Function G, double upper, std::size_t points, Function slope_left, Function slope_right,
                     Function curvature)
    : G_(std::move(G)), curvature_(std::move(curvature)), upper_(upper) {
  if (points < 2 || !(upper > 0.0)) throw Error(ErrorCode::ConfigInvalid, "flux grid needs at least 2 points");
  h_ = upper / static_cast<double>(points - 1);
  grid_.resize(points);
  values_.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid_[i] = i + 1 == points ? upper : static_cast<double>(i) * h_;
    values_[i] = G_(grid_[i]);
  }
  slope_left_.resize(points);
  slope_right_.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double fd_left = i > 0 ? (values_[i] - values_[i - 1]) / h_ : (values_[1] - values_[0]) / h_;
    const double fd_right = i + 1 < points ? (values_[i + 1] - values_[i]) / h_ : fd_left;
    slope_left_[i] = slope_left ? slope_left(grid_[i]) : fd_left;
    slope_right_[i] = slope_right ? slope_right(grid_[i]) : fd_right;
    max_slope_ = std::max({max_slope_, std::abs(slope_left_[i]), std::abs(slope_right_[i]), std::abs(fd_right)});
  }
  if (curvature_) {
    curvature_values_.resize(points);
    for (std::size_t i = 0; i < points; ++i) curvature_values_[i] = curvature_(grid_[i]);
  }

  const std::size_t levels = std::bit_width(points);
  table_min_.assign(levels, {});
  table_max_.assign(levels, {});
  table_min_[0] = values_;
  table_max_[0] = values_;
  for (std::size_t k = 1; k < levels; ++k) {
    const std::size_t span = std::size_t{1} << k;
    const std::size_t half = span >> 1;
    const std::size_t count = points - span + 1;
    table_min_[k].resize(count);
    table_max_[k].resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      table_min_[k][i] = std::min(table_min_[k - 1][i], table_min_[k - 1][i + half]);
      table_max_[k][i] = std::max(table_max_[k - 1][i], table_max_[k - 1][i + half]);
    }
  }
}

double FluxCurve::interpolate(double rho) const {
  rho = std::clamp(rho, 0.0, upper_);
  const std::size_t last = grid_.size() - 2;
  const std::size_t k = std::min(static_cast<std::size_t>(rho / h_), last);
  const double w = (rho - grid_[k]) / (grid_[k + 1] - grid_[k]);
  return values_[k] + w * (values_[k + 1] - values_[k]);
}

double FluxCurve::range_query(std::size_t lo, std::size_t hi, bool want_max) const {
  const std::size_t k = std::bit_width(hi - lo + 1) - 1;
  const auto& table = want_max ? table_max_[k] : table_min_[k];
  const double a = table[lo], b = table[hi + 1 - (std::size_t{1} << k)];
  return want_max ? std::max(a, b) : std::min(a, b);
}

namespace {

// Grid indices strictly inside (a, b), as a possibly empty closed range.
bool interior_nodes(double a, double b, double h, std::size_t points, std::size_t& lo, std::size_t& hi) {
  const double first = std::floor(a / h) + 1.0;
  const double last = std::ceil(b / h) - 1.0;
  if (first > last || last < 0.0) return false;
  lo = static_cast<std::size_t>(std::max(first, 0.0));
  hi = std::min(static_cast<std::size_t>(last), points - 1);
  return lo <= hi;
}

}  // namespace

double FluxCurve::min_over(double a, double b) const {
  if (a > b) std::swap(a, b);
  double out = std::min(interpolate(a), interpolate(b));
  std::size_t lo = 0, hi = 0;
  if (interior_nodes(a, b, h_, grid_.size(), lo, hi)) out = std::min(out, range_query(lo, hi, false));
  return out;
}

double FluxCurve::max_over(double a, double b) const {
  if (a > b) std::swap(a, b);
  double out = std::max(interpolate(a), interpolate(b));
  std::size_t lo = 0, hi = 0;
  if (interior_nodes(a, b, h_, grid_.size(), lo, hi)) out = std::max(out, range_query(lo, hi, true));
  return out;
}

FluxCurve tabulate_flux(const EquilibriumManifold& manifold, std::size_t points) {
  auto m = std::make_shared<const EquilibriumManifold>(manifold);
  auto G = [m](double rho) { return m->flux(rho); };
  auto left = [m](double rho) { return m->flux_derivative(rho).left; };
  auto right = [m](double rho) { return m->flux_derivative(rho).right; };
  auto curvature = [m](double rho) { return m->flux_second_derivative(rho); };
  FluxCurve curve(G, m->lanes(), points, left, right, curvature);
  const ModelSpec& spec = m->model();
  if (spec.n == 2 && spec.d(0) + spec.d(1) - spec.l(0) - spec.l(1) == 1.0 && spec.q(0, 1) > 0.0) {
    curve.closed_form = TwoLaneParams{spec.d(0) - spec.l(0), spec.q(1, 0) / spec.q(0, 1)};
  }
  return curve;
}

FluxCurve two_lane_curve(double d, double r, std::size_t points) {
  const double g0 = d, g1 = 1.0 - d;
  FluxCurve curve([=](double rho) { return two_lane_flux(g0, g1, r, rho); }, 2.0, points,
                  [=](double rho) { return two_lane_flux_slope(g0, g1, r, rho, false); },
                  [=](double rho) { return two_lane_flux_slope(g0, g1, r, rho, true); },
                  [=](double rho) { return two_lane_flux_curvature(g0, g1, r, rho); });
  curve.closed_form = TwoLaneParams{d, r};
  return curve;
}

}  // namespace hydro

#include "hydro/phase.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "hydro/error.hpp"

namespace hydro {

namespace phase {

double d_tilde_1() { return 0.5 + std::sqrt(3.0 + 2.0 * std::sqrt(3.0)) / 6.0; }
double d_tilde_0() { return 0.5 + std::sqrt(3.0) / 4.0; }
double d_bar_1() { return 0.5 + 0.25 * std::sqrt(2.0 * std::sqrt(3.0)); }
double d_bar_bar_1() { return 0.5 * (1.0 + 14.0 * std::sqrt(3.0) / 27.0); }
double d_1() { return (4.0 + std::sqrt(2.0)) / 6.0; }

}  // namespace phase

namespace {

constexpr double kRootTolerance = 1e-12;

// Bisection on a sign-changing bracket; returns the midpoint of the final bracket.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 400 && hi - lo > kRootTolerance * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double grow_bracket(const std::function<double(double)>& f, double start) {
  double hi = std::max(2.0 * start, start + 1.0);
  const bool sign = f(start) > 0.0;
  while ((f(hi) > 0.0) == sign && hi < 1e300) hi *= 2.0;
  return hi;
}

}  // namespace

std::string to_string(ShapeRegion region) {
  switch (region) {
    case ShapeRegion::I: return "2i";
    case ShapeRegion::II: return "2ii";
    case ShapeRegion::III: return "2iii";
    case ShapeRegion::IV: return "2iv";
    case ShapeRegion::V: return "2v";
  }
  return "?";
}

double g_cubic(double d, double r) {
  return r * r * r * (1.0 - d) + r * r * (2.0 - 3.0 * d) + r * (3.0 * d - 1.0) + d;
}

double r_tilde_1(double d) {
  const double e = 2.0 * d - 1.0;
  return 2.0 * e + std::sqrt(4.0 * e * e + 1.0);
}

double a1_coefficient(double d) {
  const double e = 2.0 * d - 1.0;
  const double s = std::sqrt(1.0 - e * e);
  return 1.0 / (2.0 * (1.0 + s) * s);
}

std::optional<std::pair<double, double>> g_stationary_points(double d) {
  if (d >= 1.0) return std::nullopt;
  const double delta = 18.0 * d * d - 24.0 * d + 7.0;
  if (delta < 0.0) return std::nullopt;
  const double r0 = (3.0 * d - 2.0) / (3.0 * (1.0 - d));
  const double w = std::sqrt(delta) / (3.0 * (1.0 - d));
  return std::make_pair(r0 - w, r0 + w);
}

CriticalCurves critical_curves(double d) {
  CriticalCurves out;
  out.d = d;
  out.r_tilde1 = r_tilde_1(d);
  if (d >= 0.5 && d <= phase::d_bar_1()) {
    const double a = a1_coefficient(d);
    if (a <= 1.0) {
      const double root = 1.0 + std::sqrt(std::max(0.0, 1.0 - a));
      out.r_bar1 = root * root / a;
    }
  }
  auto g = [d](double r) { return g_cubic(d, r); };
  if (d == 1.0) {
    out.r3 = 1.0 + std::sqrt(2.0);
  } else if (d > 1.0) {
    out.r3 = bisect(g, 1.0, grow_bracket(g, 1.0));
  } else if (auto stationary = g_stationary_points(d)) {
    const double r1 = stationary->first, r2 = stationary->second;
    if (r2 > 1.0 && g(r2) <= 0.0) {
      out.r3 = bisect(g, std::max(1.0, r1), r2);
      out.r4 = bisect(g, r2, grow_bracket(g, r2));
    }
  }
  return out;
}

std::pair<double, double> reduce_phase_point(double d, double r) {
  if (d < 0.5) d = 1.0 - d;
  if (r < 1.0) r = 1.0 / r;
  return {d, r};
}

PhasePoint classify_shape(double d_in, double r_in) {
  const auto [d, r] = reduce_phase_point(d_in, r_in);
  PhasePoint out;
  out.d = d_in;
  out.r = r_in;
  out.sign_change = d > 1.0 && r > d / (d - 1.0);
  const CriticalCurves c = critical_curves(d);
  if (d <= phase::d_tilde_1()) {
    out.region = ShapeRegion::I;
    out.inflexions = r <= *c.r_bar1 ? 0 : 2;
  } else if (d <= phase::d_tilde_0()) {
    out.region = ShapeRegion::II;
    if (r <= *c.r_bar1) {
      out.inflexions = 0;
    } else if (r < *c.r3) {
      out.inflexions = 2;
    } else if (r <= *c.r4) {
      out.inflexions = 1;
    } else {
      out.inflexions = 2;
    }
  } else if (d < 1.0) {
    out.region = ShapeRegion::III;
    if (r <= *c.r3) {
      out.inflexions = 0;
    } else if (r <= *c.r4) {
      out.inflexions = 1;
    } else {
      out.inflexions = 2;
    }
  } else if (d == 1.0) {
    out.region = ShapeRegion::IV;
    out.inflexions = r <= *c.r3 ? 0 : 1;
  } else {
    out.region = ShapeRegion::V;
    out.inflexions = r <= *c.r3 ? 0 : 1;
  }
  return out;
}

SecondDerivativeValues second_derivative_values(double d, double r) {
  SecondDerivativeValues out;
  const double e = 2.0 * d - 1.0;
  const double rp = r + 1.0;
  const double common = -(r * r + 1.0) / (rp * rp);
  const double odd = (r - 1.0) / rp * (1.0 + 2.0 * r / (rp * rp));
  out.at_0 = common - e * odd;
  out.at_2 = common + e * odd;
  out.at_1 = -1.0 + rp / (4.0 * std::sqrt(r));
  if (r != 1.0) {
    out.rho_tilde0 = 1.0 + e * 4.0 * r / ((r - 1.0) * rp);
    const double psi = 4.0 * r / (rp * rp) * (e * e * 4.0 * r / (rp * rp) + 1.0);
    out.at_rho_tilde0 = -1.0 + (-0.5 + rp * rp / (4.0 * r) * psi) / std::sqrt(psi);
  }
  return out;
}

namespace {

std::vector<double> sampled_curvature(const FluxCurve& flux, std::vector<double>& where) {
  const auto& grid = flux.grid();
  where.clear();
  std::vector<double> out;
  if (flux.has_curvature()) {
    where = grid;
    out = flux.curvature_values();
    return out;
  }
  const double h = flux.step();
  for (std::size_t k = 2; k + 2 < grid.size(); ++k) {
    const double x = grid[k];
    const double v = (-flux(x + 2 * h) + 16.0 * flux(x + h) - 30.0 * flux(x) + 16.0 * flux(x - h) - flux(x - 2 * h)) /
                     (12.0 * h * h);
    where.push_back(x);
    out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> sign_changes(const std::vector<double>& s, double dead_band) {
  std::vector<std::size_t> changes;
  int last_sign = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!(std::abs(s[k]) >= dead_band)) continue;
    const int sign = s[k] > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) changes.push_back(k);
    last_sign = sign;
  }
  for (std::size_t k = 1; k < changes.size(); ++k) {
    if (changes[k] - changes[k - 1] < 4) {
      std::ostringstream msg;
      msg << "sign changes of G'' only " << changes[k] - changes[k - 1] << " cells apart";
      throw Error(ErrorCode::GridTooCoarse, msg.str());
    }
  }
  return changes;
}

}  // namespace

int count_inflexions_numeric(const FluxCurve& flux, double dead_band) {
  std::vector<double> where;
  const std::vector<double> s = sampled_curvature(flux, where);
  return static_cast<int>(sign_changes(s, dead_band).size());
}

InflexionPlacement inflexion_placement(const FluxCurve& flux, double dead_band) {
  std::vector<double> where;
  const std::vector<double> s = sampled_curvature(flux, where);
  InflexionPlacement out;
  for (std::size_t k : sign_changes(s, dead_band)) {
    (where[k] <= 1.0 ? out.left_of_one : out.right_of_one) += 1;
  }
  return out;
}

}  // namespace hydro

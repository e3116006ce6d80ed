#include "hydro/scalar_pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hydro/error.hpp"

namespace hydro {

namespace {

constexpr double kTieTolerance = 1e-9;
constexpr double kRefineTolerance = 1e-10;
constexpr double kRangeSlack = 1e-12;

}  // namespace

DensityField DensityField::from_function(double x0, double x1, double dx, const std::function<double(double)>& u) {
  DensityField f;
  f.x0 = x0;
  f.dx = dx;
  const auto cells = static_cast<Eigen::Index>(std::llround((x1 - x0) / dx));
  f.values.resize(cells);
  for (Eigen::Index k = 0; k < cells; ++k) f.values(k) = u(f.center(k));
  return f;
}

DensityField DensityField::cell_averages(double x0, double x1, double dx, const std::function<double(double)>& u,
                                         int samples) {
  DensityField f;
  f.x0 = x0;
  f.dx = dx;
  const auto cells = static_cast<Eigen::Index>(std::llround((x1 - x0) / dx));
  f.values.resize(cells);
  for (Eigen::Index k = 0; k < cells; ++k) {
    double sum = 0.0;
    for (int s = 0; s < samples; ++s) sum += u(x0 + (static_cast<double>(k) + (s + 0.5) / samples) * dx);
    f.values(k) = sum / samples;
  }
  return f;
}

RiemannProblem::RiemannProblem(const FluxCurve& flux, double alpha, double beta)
    : flux_(&flux),
      alpha_(alpha),
      beta_(beta),
      lo_(std::min(alpha, beta)),
      hi_(std::max(alpha, beta)),
      decreasing_(alpha >= beta) {
  if (hi_ - lo_ <= 0.0) {
    h_ = 0.0;
    return;
  }
  const std::size_t points = 4 * (flux.size() - 1) + 1;
  h_ = (hi_ - lo_) / static_cast<double>(points - 1);
  rho_.resize(points);
  G_.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    rho_[k] = k + 1 == points ? hi_ : lo_ + static_cast<double>(k) * h_;
    G_[k] = flux(rho_[k]);
  }
}

double RiemannProblem::objective(double rho, double v) const {
  const double value = v * rho - (*flux_)(rho);
  return decreasing_ ? value : -value;
}

double RiemannProblem::refine(double a, double b, double v) const {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = objective(c, v), fd = objective(d, v);
  while (b - a > kRefineTolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c, v);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d, v);
    }
  }
  return 0.5 * (a + b);
}

OneSidedValue RiemannProblem::operator()(double v) const {
  if (rho_.empty()) return {alpha_, alpha_};
  const std::size_t points = rho_.size();
  std::vector<double> obj(points);
  const double sign = decreasing_ ? 1.0 : -1.0;
  double best = INFINITY;
  for (std::size_t k = 0; k < points; ++k) {
    obj[k] = sign * (v * rho_[k] - G_[k]);
    best = std::min(best, obj[k]);
  }

  struct Cluster {
    double lo, hi, value;
  };
  std::vector<Cluster> clusters;
  for (std::size_t k = 0; k < points;) {
    if (obj[k] > best + kTieTolerance) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end + 1 < points && obj[end + 1] <= best + kTieTolerance) ++end;
    if (end - k <= 2) {
      const double a = rho_[k > 0 ? k - 1 : 0];
      const double b = rho_[std::min(end + 1, points - 1)];
      double p = refine(a, b, v);
      double value = objective(p, v);
      for (double candidate : {a, b, rho_[k], rho_[end]}) {
        const double cv = objective(candidate, v);
        if (cv <= value) {
          value = cv;
          p = candidate;
        }
      }
      clusters.push_back({p, p, value});
    } else {
      clusters.push_back({rho_[k], rho_[end], std::min(obj[k], obj[end])});
    }
    k = end + 1;
  }

  double refined_best = INFINITY;
  for (const auto& c : clusters) refined_best = std::min(refined_best, c.value);
  double smallest = INFINITY, largest = -INFINITY;
  for (const auto& c : clusters) {
    if (c.value > refined_best + kTieTolerance) continue;
    smallest = std::min(smallest, c.lo);
    largest = std::max(largest, c.hi);
  }
  return decreasing_ ? OneSidedValue{largest, smallest} : OneSidedValue{smallest, largest};
}

double RiemannProblem::value(double x, double t) const {
  const OneSidedValue u = at(x, t);
  return 0.5 * (u.minus + u.plus);
}

OneSidedValue riemann_solve(const FluxCurve& flux, double alpha, double beta, double v) {
  return RiemannProblem(flux, alpha, beta)(v);
}

RiemannSolution riemann_profile(const FluxCurve& flux, double alpha, double beta, const std::vector<double>& v_grid) {
  const RiemannProblem problem(flux, alpha, beta);
  RiemannSolution out;
  out.alpha = alpha;
  out.beta = beta;
  out.v = v_grid;
  for (double v : v_grid) {
    const OneSidedValue u = problem(v);
    out.u_minus.push_back(u.minus);
    out.u_plus.push_back(u.plus);
  }
  return out;
}

double godunov_flux(const FluxCurve& flux, double uL, double uR) {
  return uL <= uR ? flux.min_over(uL, uR) : flux.max_over(uR, uL);
}

DensityField cauchy_solve(const FluxCurve& flux, DensityField u, double T, const CauchyOptions& options) {
  if (!(options.cfl > 0.0 && options.cfl <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "cfl must lie in (0, 1]");
  const Eigen::Index K = u.cells();
  const double speed = flux.max_abs_slope();
  const double dt_max = speed > 0.0 ? options.cfl * u.dx / speed : T;
  Eigen::ArrayXd F(K + 1);
  const double end_time = u.t + T;
  while (u.t < end_time - 1e-14 * std::max(1.0, end_time)) {
    const double dt = std::min(dt_max, end_time - u.t);
    F(0) = godunov_flux(flux, u.values(0), u.values(0));
    F(K) = godunov_flux(flux, u.values(K - 1), u.values(K - 1));
    for (Eigen::Index k = 1; k < K; ++k) F(k) = godunov_flux(flux, u.values(k - 1), u.values(k));
    u.values -= (dt / u.dx) * (F.tail(K) - F.head(K));
    u.t += dt;
    const double lo = u.values.minCoeff(), hi = u.values.maxCoeff();
    if (lo < -kRangeSlack || hi > flux.upper() + kRangeSlack) {
      std::ostringstream msg;
      msg << "cell values left [0, " << flux.upper() << "] at t = " << u.t << " (min " << lo << ", max " << hi << ")";
      throw Error(ErrorCode::UnstableStep, msg.str());
    }
    if (options.on_step) options.on_step(u);
  }
  return u;
}

DensityField cauchy_solve(const FluxCurve& flux, DensityField u0, double T, double cfl) {
  CauchyOptions options;
  options.cfl = cfl;
  return cauchy_solve(flux, std::move(u0), T, options);
}

namespace {

// Average of b over [lo, hi] intersected with its domain; returns the covered length.
double project(const DensityField& b, double lo, double hi, double& covered) {
  lo = std::max(lo, b.x0);
  hi = std::min(hi, b.x_end());
  covered = std::max(0.0, hi - lo);
  if (covered <= 0.0) return 0.0;
  const auto first = static_cast<Eigen::Index>(std::floor((lo - b.x0) / b.dx));
  const auto last = std::min(static_cast<Eigen::Index>(std::floor((hi - b.x0) / b.dx)), b.cells() - 1);
  // Slivers left by rounding of the cell edges are dropped so that equal grids compare exactly.
  const double sliver = 1e-9 * b.dx;
  double sum = 0.0, weight = 0.0;
  int used = 0;
  Eigen::Index only = 0;
  for (Eigen::Index k = std::max<Eigen::Index>(first, 0); k <= last; ++k) {
    const double a = std::max(lo, b.x0 + k * b.dx), c = std::min(hi, b.x0 + (k + 1) * b.dx);
    if (c - a > sliver) {
      sum += (c - a) * b.values(k);
      weight += c - a;
      ++used;
      only = k;
    }
  }
  if (used == 1) return b.values(only);
  return weight > 0.0 ? sum / weight : 0.0;
}

template <typename Accumulate>
void compare_cells(const DensityField& a, const DensityField& b, const Window& window, Accumulate&& acc) {
  bool any = false;
  for (Eigen::Index k = 0; k < a.cells(); ++k) {
    const double cl = a.x0 + k * a.dx, cr = cl + a.dx;
    const double lo = std::max(cl, window.lo), hi = std::min(cr, window.hi);
    if (hi <= lo) continue;
    double covered = 0.0;
    const double bk = project(b, cl, cr, covered);
    if (covered <= 0.0) continue;
    double overlap = 0.0;
    project(b, lo, hi, overlap);
    if (overlap <= 0.0) continue;
    any = true;
    acc(std::abs(a.values(k) - bk), overlap);
  }
  if (!any) throw Error(ErrorCode::DisjointWindows, "fields and window share no support");
}

}  // namespace

double l1_distance(const DensityField& a, const DensityField& b, const Window& window) {
  double sum = 0.0;
  compare_cells(a, b, window, [&](double diff, double len) { sum += diff * len; });
  return sum;
}

double linf_distance(const DensityField& a, const DensityField& b, const Window& window) {
  double out = 0.0;
  compare_cells(a, b, window, [&](double diff, double) { out = std::max(out, diff); });
  return out;
}

double total_variation(const DensityField& a) {
  if (a.cells() < 2) return 0.0;
  return (a.values.tail(a.cells() - 1) - a.values.head(a.cells() - 1)).abs().sum();
}

}  // namespace hydro

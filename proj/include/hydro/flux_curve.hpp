#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace hydro {

class EquilibriumManifold;

struct TwoLaneParams {
  double d = 0.5;
  double r = 1.0;
};

// G on [0, upper] with a uniform tabulation. The Godunov machinery works on the
// piecewise-linear interpolant of the table, for which range extrema are exact.
class FluxCurve {
 public:
  using Function = std::function<double(double)>;

  FluxCurve(Function G, double upper, std::size_t points, Function slope_left = {}, Function slope_right = {},
            Function curvature = {});

  double upper() const { return upper_; }
  std::size_t size() const { return grid_.size(); }
  double step() const { return h_; }

  // Exact evaluation of G.
  double operator()(double rho) const { return G_(rho); }
  const Function& function() const { return G_; }
  bool has_curvature() const { return static_cast<bool>(curvature_); }
  double curvature(double rho) const { return curvature_(rho); }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& slope_left() const { return slope_left_; }
  const std::vector<double>& slope_right() const { return slope_right_; }
  const std::vector<double>& curvature_values() const { return curvature_values_; }

  double interpolate(double rho) const;
  double max_abs_slope() const { return max_slope_; }
  double min_over(double a, double b) const;
  double max_over(double a, double b) const;

  std::optional<TwoLaneParams> closed_form;

 private:
  double range_query(std::size_t lo, std::size_t hi, bool want_max) const;

  Function G_;
  Function curvature_;
  double upper_;
  double h_;
  std::vector<double> grid_, values_, slope_left_, slope_right_, curvature_values_;
  std::vector<std::vector<double>> table_min_, table_max_;
  double max_slope_ = 0.0;
};

FluxCurve tabulate_flux(const EquilibriumManifold& manifold, std::size_t points);
// Closed-form two-lane curve with gamma0 = d, gamma1 = 1 - d.
FluxCurve two_lane_curve(double d, double r, std::size_t points);

}  // namespace hydro

#pragma once

#include <optional>
#include <string>

#include "hydro/flux_curve.hpp"

namespace hydro {

namespace phase {

double d_tilde_1();
double d_tilde_0();
double d_bar_1();
double d_bar_bar_1();
double d_1();

}  // namespace phase

enum class ShapeRegion { I, II, III, IV, V };

std::string to_string(ShapeRegion region);

struct CriticalCurves {
  double d = 0.5;
  double r_tilde1 = 1.0;
  std::optional<double> r_bar1;
  std::optional<double> r3;
  std::optional<double> r4;
};

struct PhasePoint {
  double d = 0.5;
  double r = 1.0;
  ShapeRegion region = ShapeRegion::I;
  int inflexions = 0;
  bool sign_change = false;
};

struct SecondDerivativeValues {
  double at_0 = 0.0;
  double at_1 = 0.0;
  double at_2 = 0.0;
  // Absent for r = 1, where G'' is the constant -1/2.
  std::optional<double> rho_tilde0;
  std::optional<double> at_rho_tilde0;
};

double g_cubic(double d, double r);
double r_tilde_1(double d);
double a1_coefficient(double d);
// Stationary points r0 -/+ sqrt(delta)/(3(1-d)) of g when delta >= 0 and d < 1.
std::optional<std::pair<double, double>> g_stationary_points(double d);
CriticalCurves critical_curves(double d);

// Maps (d, r) onto d >= 1/2, r >= 1 via the symmetries of the two-lane flux.
std::pair<double, double> reduce_phase_point(double d, double r);
PhasePoint classify_shape(double d, double r);
SecondDerivativeValues second_derivative_values(double d, double r);

// Sign changes of G'' sampled on the curve grid, ignoring |G''| < dead_band.
int count_inflexions_numeric(const FluxCurve& flux, double dead_band = 1e-9);

// Inflexion placement relative to rho = 1 for 1/2 <= d <= 1 (0: left, 1: right).
struct InflexionPlacement {
  int left_of_one = 0;
  int right_of_one = 0;
};
InflexionPlacement inflexion_placement(const FluxCurve& flux, double dead_band = 1e-9);

}  // namespace hydro

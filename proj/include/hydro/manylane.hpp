#pragma once

#include <functional>
#include <vector>

#include "hydro/flux_curve.hpp"
#include "hydro/scalar_pde.hpp"

namespace hydro {

using TargetFlux = std::function<double(double)>;

struct HillFluxFamily {
  int n = 1;
  TargetFlux F;

  double rate(int i) const;
  double operator()(double u) const;
  // Hill flux on [0, n] in the unnormalized density variable.
  double unnormalized(double rho) const;
};

double normalized_flux(int n, const TargetFlux& F, double u);
FluxCurve normalized_flux_curve(int n, const TargetFlux& F, int points_per_hill = 64);

struct ManylaneRow {
  int n = 0;
  double sup_distance = 0.0;
  double exclusion_radius = 0.0;
  int points_used = 0;
};

struct ManylaneStudy {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> jumps;
  std::vector<ManylaneRow> rows;
};

ManylaneStudy manylane_riemann_study(const TargetFlux& F, double alpha, double beta, const std::vector<int>& n_list,
                                     const std::vector<double>& v_grid);

}  // namespace hydro

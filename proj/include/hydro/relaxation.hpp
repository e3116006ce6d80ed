#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "hydro/equilibrium.hpp"
#include "hydro/model.hpp"
#include "hydro/scalar_pde.hpp"

namespace hydro {

using LaneMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LaneSystemState {
  double x0 = 0.0;
  double dx = 1.0;
  double t = 0.0;
  // rho(k, i): density of lane i in cell k.
  LaneMatrix rho;

  Eigen::Index cells() const { return rho.rows(); }
  int lanes() const { return static_cast<int>(rho.cols()); }
  double center(Eigen::Index k) const { return x0 + (static_cast<double>(k) + 0.5) * dx; }
  DensityField lane(int i) const;
  DensityField total() const;
};

Eigen::VectorXd source_term(const ModelSpec& model, const Eigen::Ref<const Eigen::VectorXd>& rho);
Eigen::MatrixXd source_jacobian(const ModelSpec& model, const Eigen::Ref<const Eigen::VectorXd>& rho);

struct RelaxationOptions {
  double epsilon = 0.01;
  double cfl = 0.45;
  int newton_max_iterations = 50;
  double newton_tolerance = 1e-14;
  double damping = 0.5;
};

struct RelaxationDiagnostics {
  long long source_substeps = 0;
  long long newton_iterations = 0;
  long long box_projections = 0;
  double max_conservation_defect = 0.0;
};

struct EntropyResidual {
  double c = 0.0;
  Eigen::VectorXd reference;
  double dt = 0.0;
  // Cellwise residual of the discrete entropy balance for one time step.
  Eigen::ArrayXd residual;
  double integrated() const;
};

class RelaxationSolver {
 public:
  RelaxationSolver(const ModelSpec& model, RelaxationOptions options);

  const ModelSpec& model() const { return model_; }
  const EquilibriumManifold& manifold() const { return manifold_; }
  const RelaxationOptions& options() const { return options_; }
  const RelaxationDiagnostics& diagnostics() const { return diagnostics_; }

  double time_step(double dx) const;
  // Integrates d rho / d tau = c(rho) / epsilon over tau in one cell; returns the entropy pairing if requested.
  void source_step(Eigen::Ref<Eigen::VectorXd> rho, double tau, const Eigen::VectorXd* reference = nullptr,
                   double* pairing = nullptr);
  void transport_step(LaneSystemState& state, double dt) const;
  void step(LaneSystemState& state, double dt, EntropyResidual* probe = nullptr);
  LaneSystemState solve(LaneSystemState state, double T,
                        const std::function<void(const LaneSystemState&)>& on_step = {});

 private:
  void backward_euler(Eigen::Ref<Eigen::VectorXd> rho, double mu);

  ModelSpec model_;
  EquilibriumManifold manifold_;
  RelaxationOptions options_;
  RelaxationDiagnostics diagnostics_;
  Eigen::VectorXd gamma_;
};

// Godunov flux for gamma rho (1 - rho).
double lane_godunov_flux(double gamma, double uL, double uR);

std::vector<LaneSystemState> relax_solve(const ModelSpec& model, double epsilon, const LaneSystemState& rho0, double T,
                                         double cfl, const std::vector<double>& snapshot_times);

// One step of the split scheme from `state`, measured against the manifold point of total density c.
EntropyResidual entropy_residual(RelaxationSolver& solver, const LaneSystemState& state, double c);

// Lanes placed on the manifold point of the given total profile.
LaneSystemState manifold_state(const EquilibriumManifold& manifold, const DensityField& total);

}  // namespace hydro

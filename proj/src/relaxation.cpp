#include "hydro/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "hydro/error.hpp"

namespace hydro {

DensityField LaneSystemState::lane(int i) const {
  DensityField f;
  f.x0 = x0;
  f.dx = dx;
  f.t = t;
  f.values = rho.col(i).array();
  return f;
}

DensityField LaneSystemState::total() const {
  DensityField f;
  f.x0 = x0;
  f.dx = dx;
  f.t = t;
  f.values = rho.rowwise().sum().array();
  return f;
}

Eigen::VectorXd source_term(const ModelSpec& model, const Eigen::Ref<const Eigen::VectorXd>& rho) {
  const int n = model.n;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      c(i) += model.q(j, i) * rho(j) * (1.0 - rho(i)) - model.q(i, j) * rho(i) * (1.0 - rho(j));
    }
  }
  return c;
}

Eigen::MatrixXd source_jacobian(const ModelSpec& model, const Eigen::Ref<const Eigen::VectorXd>& rho) {
  const int n = model.n;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      J(i, i) -= model.q(k, i) * rho(k) + model.q(i, k) * (1.0 - rho(k));
      J(i, k) = model.q(k, i) * (1.0 - rho(i)) + model.q(i, k) * rho(i);
    }
  }
  return J;
}

double EntropyResidual::integrated() const { return residual.sum(); }

RelaxationSolver::RelaxationSolver(const ModelSpec& model, RelaxationOptions options)
    : model_(model), manifold_(model), options_(options), gamma_(model.drift()) {
  if (!(options_.epsilon > 0.0)) throw Error(ErrorCode::ConfigInvalid, "epsilon must be positive");
  if (!(options_.cfl > 0.0 && options_.cfl <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "cfl must lie in (0, 1]");
}

double RelaxationSolver::time_step(double dx) const {
  const double speed = gamma_.cwiseAbs().maxCoeff();
  return speed > 0.0 ? options_.cfl * dx / speed : options_.cfl * dx;
}

void RelaxationSolver::backward_euler(Eigen::Ref<Eigen::VectorXd> x, double mu) {
  const int n = model_.n;
  const Eigen::VectorXd y = x;
  const double mass = y.sum();
  auto residual = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd F = z - y - mu * source_term(model_, z);
    F(n - 1) = z.sum() - mass;
    return F;
  };
  Eigen::VectorXd z = y;
  Eigen::VectorXd F = residual(z);
  double norm = F.lpNorm<Eigen::Infinity>();
  int it = 0;
  for (; it < options_.newton_max_iterations && norm > options_.newton_tolerance; ++it) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) - mu * source_jacobian(model_, z);
    J.row(n - 1).setOnes();
    const Eigen::VectorXd delta = J.partialPivLu().solve(-F);
    double lambda = 1.0;
    Eigen::VectorXd trial = z + delta;
    Eigen::VectorXd Ft = residual(trial);
    while (Ft.lpNorm<Eigen::Infinity>() > (1.0 - 1e-4 * lambda) * norm && lambda > 1e-6) {
      lambda *= options_.damping;
      trial = z + lambda * delta;
      Ft = residual(trial);
    }
    const double new_norm = Ft.lpNorm<Eigen::Infinity>();
    if (new_norm >= norm) break;
    z = trial;
    F = Ft;
    norm = new_norm;
  }
  diagnostics_.newton_iterations += it;
  if (norm > 1e-10) {
    std::ostringstream msg;
    msg << "backward Euler residual " << norm << " after " << it << " iterations";
    throw Error(ErrorCode::NewtonDivergence, msg.str());
  }
  if (z.minCoeff() < -1e-14 || z.maxCoeff() > 1.0 + 1e-14) {
    ++diagnostics_.box_projections;
    if (diagnostics_.box_projections == 1) std::cerr << "warning: projecting source step back into the box\n";
  }
  z = z.cwiseMax(0.0).cwiseMin(1.0);
  diagnostics_.max_conservation_defect = std::max(diagnostics_.max_conservation_defect, std::abs(z.sum() - mass));
  x = z;
}

void RelaxationSolver::source_step(Eigen::Ref<Eigen::VectorXd> rho, double tau, const Eigen::VectorXd* reference,
                                   double* pairing) {
  const double max_sub = options_.epsilon / 4.0;
  const int steps = std::max(1, static_cast<int>(std::ceil(tau / max_sub - 1e-12)));
  const double h = tau / steps;
  for (int s = 0; s < steps; ++s) {
    backward_euler(rho, h / options_.epsilon);
    ++diagnostics_.source_substeps;
    if (reference && pairing) {
      const Eigen::VectorXd c = source_term(model_, rho);
      for (int i = 0; i < model_.n; ++i) {
        if (rho(i) > (*reference)(i)) *pairing += h * c(i) / options_.epsilon;
      }
    }
  }
}

double lane_godunov_flux(double gamma, double uL, double uR) {
  auto f = [gamma](double u) { return gamma * u * (1.0 - u); };
  const double lo = std::min(uL, uR), hi = std::max(uL, uR);
  const double mid = std::clamp(0.5, lo, hi);
  const bool concave = gamma >= 0.0;
  if (uL <= uR) return concave ? std::min(f(lo), f(hi)) : f(mid);
  return concave ? f(mid) : std::max(f(lo), f(hi));
}

void RelaxationSolver::transport_step(LaneSystemState& state, double dt) const {
  const Eigen::Index K = state.cells();
  const double ratio = dt / state.dx;
  Eigen::ArrayXd F(K + 1);
  for (int i = 0; i < model_.n; ++i) {
    const double g = gamma_(i);
    auto col = state.rho.col(i);
    F(0) = lane_godunov_flux(g, col(0), col(0));
    F(K) = lane_godunov_flux(g, col(K - 1), col(K - 1));
    for (Eigen::Index k = 1; k < K; ++k) F(k) = lane_godunov_flux(g, col(k - 1), col(k));
    col.array() -= ratio * (F.tail(K) - F.head(K));
  }
}

void RelaxationSolver::step(LaneSystemState& state, double dt, EntropyResidual* probe) {
  const Eigen::Index K = state.cells();
  const int n = model_.n;
  Eigen::ArrayXd before, pairing, psi;
  auto entropy = [&](const LaneMatrix& rho) {
    Eigen::ArrayXd H = Eigen::ArrayXd::Zero(K);
    for (Eigen::Index k = 0; k < K; ++k) {
      for (int i = 0; i < n; ++i) H(k) += std::max(rho(k, i) - probe->reference(i), 0.0);
    }
    return H;
  };
  if (probe) {
    before = entropy(state.rho);
    pairing = Eigen::ArrayXd::Zero(K);
  }
  auto half_source = [&]() {
    for (Eigen::Index k = 0; k < K; ++k) {
      Eigen::VectorXd cell = state.rho.row(k).transpose();
      double p = 0.0;
      source_step(cell, 0.5 * dt, probe ? &probe->reference : nullptr, probe ? &p : nullptr);
      state.rho.row(k) = cell.transpose();
      if (probe) pairing(k) += p;
    }
  };
  half_source();
  if (probe) {
    psi = Eigen::ArrayXd::Zero(K + 1);
    for (int i = 0; i < n; ++i) {
      const double r = probe->reference(i), g = gamma_(i);
      const double fr = g * r * (1.0 - r);
      auto up = [&](Eigen::Index k) { return std::max(state.rho(std::clamp<Eigen::Index>(k, 0, K - 1), i), r); };
      for (Eigen::Index k = 0; k <= K; ++k) psi(k) += lane_godunov_flux(g, up(k - 1), up(k)) - fr;
    }
  }
  transport_step(state, dt);
  half_source();
  state.t += dt;
  if (probe) {
    const Eigen::ArrayXd after = entropy(state.rho);
    probe->dt = dt;
    probe->residual = (after - before) / dt + (psi.tail(K) - psi.head(K)) / state.dx - pairing / dt;
  }
}

LaneSystemState RelaxationSolver::solve(LaneSystemState state, double T,
                                        const std::function<void(const LaneSystemState&)>& on_step) {
  if (state.lanes() != model_.n) throw Error(ErrorCode::ConfigInvalid, "lane count of the data does not match the model");
  if (state.rho.minCoeff() < 0.0 || state.rho.maxCoeff() > 1.0) {
    throw Error(ErrorCode::ProfileOutOfRange, "lane densities must lie in [0, 1]");
  }
  const double dt_max = time_step(state.dx);
  const double end_time = state.t + T;
  while (state.t < end_time - 1e-14 * std::max(1.0, end_time)) {
    step(state, std::min(dt_max, end_time - state.t));
    if (on_step) on_step(state);
  }
  return state;
}

std::vector<LaneSystemState> relax_solve(const ModelSpec& model, double epsilon, const LaneSystemState& rho0, double T,
                                         double cfl, const std::vector<double>& snapshot_times) {
  RelaxationOptions options;
  options.epsilon = epsilon;
  options.cfl = cfl;
  RelaxationSolver solver(model, options);
  std::vector<double> times = snapshot_times;
  times.push_back(T);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              times.end());
  std::vector<LaneSystemState> out;
  LaneSystemState state = rho0;
  for (double target : times) {
    if (target < state.t - 1e-14 || target > rho0.t + T + 1e-14) continue;
    state = solver.solve(state, target - state.t);
    out.push_back(state);
  }
  return out;
}

EntropyResidual entropy_residual(RelaxationSolver& solver, const LaneSystemState& state, double c) {
  EntropyResidual out;
  out.c = c;
  out.reference = solver.manifold().point(c);
  LaneSystemState copy = state;
  solver.step(copy, solver.time_step(state.dx), &out);
  return out;
}

LaneSystemState manifold_state(const EquilibriumManifold& manifold, const DensityField& total) {
  LaneSystemState s;
  s.x0 = total.x0;
  s.dx = total.dx;
  s.t = total.t;
  s.rho.resize(total.cells(), manifold.lanes());
  for (Eigen::Index k = 0; k < total.cells(); ++k) s.rho.row(k) = manifold.point(total.values(k)).transpose();
  return s;
}

}  // namespace hydro

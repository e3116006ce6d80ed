#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hydro/equilibrium.hpp"
#include "hydro/model.hpp"
#include "hydro/scalar_pde.hpp"

namespace hydro {

enum class Boundary { Periodic, Padded };

struct ParticleConfiguration {
  std::int64_t z_min = 0;
  std::int64_t z_max = -1;
  int lanes = 0;
  // occ[(z - z_min) * lanes + i]
  std::vector<std::uint8_t> occ;
  Boundary boundary = Boundary::Periodic;
  double pad_left = 0.0;
  double pad_right = 0.0;
  std::uint64_t seed = 0;

  static ParticleConfiguration empty(std::int64_t z_min, std::int64_t z_max, int lanes, Boundary boundary);

  std::int64_t columns() const { return z_max - z_min + 1; }
  std::size_t index(std::int64_t z, int i) const { return static_cast<std::size_t>((z - z_min) * lanes + i); }
  std::uint8_t at(std::int64_t z, int i) const { return occ[index(z, i)]; }
  void set(std::int64_t z, int i, bool value) { occ[index(z, i)] = value ? 1 : 0; }
  std::int64_t particles() const;
};

using Profile = std::function<double(double)>;

Profile riemann_profile_function(double alpha, double beta);
Profile constant_profile(double rho);

ParticleConfiguration sample_local_gibbs(const EquilibriumManifold& manifold, const Profile& u, double N,
                                         std::int64_t z_min, std::int64_t z_max, Boundary boundary,
                                         std::uint64_t seed);

struct CoupledPair {
  ParticleConfiguration eta;
  ParticleConfiguration xi;
};

// Both copies share the same uniforms, so u <= v pointwise gives eta <= xi sitewise.
CoupledPair sample_coupled_gibbs(const EquilibriumManifold& manifold, const Profile& u, const Profile& v, double N,
                                 std::int64_t z_min, std::int64_t z_max, Boundary boundary, std::uint64_t seed);

struct SimulationOptions {
  std::vector<double> snapshot_times;
  std::optional<Window> measured;
  std::uint64_t seed = 0;
  std::int64_t max_events = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ParticleConfiguration> snapshots;
  std::int64_t events = 0;
  std::int64_t accepted = 0;
  std::int64_t right_jumps = 0;
  std::int64_t left_jumps = 0;
  // Events after which the particle count differed from the initial count.
  std::int64_t mass_violations = 0;
  double final_time = 0.0;
};

double propagation_speed(const ModelSpec& spec);
void check_measurement_window(const ModelSpec& spec, const ParticleConfiguration& cfg, double N, double T,
                              const Window& measured);

// Horizontal rates N d_i, N l_i and vertical rates theta q(i,j), run to time T.
Trajectory simulate(const ModelSpec& spec, const ParticleConfiguration& cfg, double theta, double T, double N,
                    const SimulationOptions& options = {});

struct EmpiricalDensity {
  std::vector<DensityField> lanes;
  DensityField total;
};

EmpiricalDensity empirical_density(const ParticleConfiguration& cfg, double N, std::int64_t bin_width);

struct CurrentEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> replicas;
};

CurrentEstimate stationary_current(const ModelSpec& spec, double rho, std::int64_t L, double T, int replicas,
                                   std::uint64_t seed, double theta = 1.0);

struct CoupledOptions {
  std::vector<double> record_times;
  std::uint64_t seed = 0;
  std::int64_t max_events = 0;
};

struct CoupledTrajectory {
  std::vector<double> times;
  std::vector<std::int64_t> d_plus;
  std::vector<std::int64_t> d_minus;
  std::vector<std::int64_t> partial_sum;
  std::int64_t sup_partial_sum = 0;
  std::int64_t events = 0;
  std::int64_t coalescences = 0;
  // Events at which D+ or D- increased, or at which they changed by different amounts.
  std::int64_t discrepancy_violations = 0;
  bool initially_ordered = false;
  std::int64_t order_violations = 0;
  CoupledPair final_state;
  double final_time = 0.0;
};

CoupledTrajectory coupled_simulate(const ModelSpec& spec, const ParticleConfiguration& eta0,
                                   const ParticleConfiguration& xi0, double theta, double T, double N,
                                   const CoupledOptions& options = {});

// sup_z |sum_{u >= z} sum_i (eta(u,i) - xi(u,i))|
std::int64_t partial_sum_statistic(const ParticleConfiguration& eta, const ParticleConfiguration& xi);

}  // namespace hydro

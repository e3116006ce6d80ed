#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hydro/io.hpp"
#include "hydro/manylane.hpp"
#include "hydro/particles.hpp"

namespace hydro {

struct ExperimentConfig {
  // flux | phase | riemann | cauchy | relax | simulate | current | manylane | compare
  std::string kind;
  json params = json::object();
  std::uint64_t seed = 0;
  std::string output;
};

struct ExperimentResult {
  int status = 0;
  std::vector<std::string> artifacts;
  json summary = json::object();
};

ExperimentResult run_experiment(const ExperimentConfig& config);

json compare_fields(const std::string& a, const std::string& b, const std::optional<Window>& window,
                    const std::string& norm);

// riemann:A:B or constant:C
Profile parse_profile(const std::string& text);
// a:b:k -> k evenly spaced points from a to b
std::vector<double> parse_range(const std::string& text);
Window parse_window(const std::string& text);
TargetFlux target_flux_by_name(const std::string& name);

// Replica-averaged empirical density of a two-sided profile at the given macroscopic times.
struct ParticleProfileRun {
  std::vector<double> times;
  std::vector<EmpiricalDensity> densities;
};

ParticleProfileRun particle_profile(const ModelSpec& spec, const Profile& u, double N, const std::vector<double>& times,
                                    const Window& measured, std::int64_t bin_width, int replicas, std::uint64_t seed);

}  // namespace hydro

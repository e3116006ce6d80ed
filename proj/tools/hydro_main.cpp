#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hydro/error.hpp"
#include "hydro/experiments.hpp"

namespace {

using hydro::json;

// Flags that were given on the command line are copied into the experiment parameters.
struct Command {
  CLI::App* app = nullptr;
  std::vector<std::function<void(json&)>> collect;
  std::string output;
  std::uint64_t seed = 0;
};

template <typename T>
void flag(Command& cmd, const std::string& name, const std::string& key, const std::string& help) {
  auto value = std::make_shared<T>();
  CLI::Option* opt = cmd.app->add_option(name, *value, help);
  cmd.collect.push_back([opt, value, key](json& params) {
    if (opt->count() > 0) params[key] = *value;
  });
}

void switch_flag(Command& cmd, const std::string& name, const std::string& key, const std::string& help) {
  CLI::Option* opt = cmd.app->add_flag(name, help);
  cmd.collect.push_back([opt, key](json& params) {
    if (opt->count() > 0) params[key] = true;
  });
}

Command& add_command(std::map<std::string, Command>& commands, CLI::App& root, const std::string& name,
                     const std::string& description, bool needs_model) {
  Command& cmd = commands[name];
  cmd.app = root.add_subcommand(name, description);
  if (needs_model) flag<std::string>(cmd, "--model", "model", "model JSON file (n, d, l, q, theta)");
  cmd.app->add_option("--out", cmd.output, "output path; a <out>.manifest.json sidecar is also written")->required();
  cmd.app->add_option("--seed", cmd.seed, "random seed (HYDRO_SEED overrides)");
  return cmd;
}

bool is_model_error(hydro::ErrorCode code) {
  using hydro::ErrorCode;
  return code == ErrorCode::ZeroLaneRate || code == ErrorCode::NotWeaklyIrreducible ||
         code == ErrorCode::NoReversibleMeasure || code == ErrorCode::ExponentTooSmall ||
         code == ErrorCode::ModelInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"hydro: multilane exclusion models, their equilibrium flux and hydrodynamic limits"};
  root.require_subcommand(1);
  std::map<std::string, Command> commands;

  {
    Command& c = add_command(commands, root, "flux", "tabulate G(rho) with one-sided slopes and curvature", true);
    flag<int>(c, "--grid", "grid", "number of grid points on [0, n] (default 2001)");
  }
  {
    Command& c = add_command(commands, root, "phase", "classify two-lane flux shapes on a (d, r) grid", false);
    flag<std::string>(c, "--d-range", "d_range", "d grid as a:b:count (default 0.5:3:200)");
    flag<std::string>(c, "--r-range", "r_range", "r grid as a:b:count (default 1:100:200)");
    switch_flag(c, "--log-r", "log_r", "space r logarithmically");
    flag<std::string>(c, "--curves-out", "curves_out", "critical curve CSV (default <out>_curves.csv)");
  }
  {
    Command& c = add_command(commands, root, "riemann", "self-similar entropy solution of a Riemann problem", true);
    flag<double>(c, "--d", "d", "two-lane closed form: d (used without --model)");
    flag<double>(c, "--r", "r", "two-lane closed form: r (used without --model)");
    flag<double>(c, "--alpha", "alpha", "left state");
    flag<double>(c, "--beta", "beta", "right state");
    flag<double>(c, "--t", "t", "time (default 1); v = x / t");
    flag<std::string>(c, "--v-range", "v_range", "v grid as a:b:count (default -3:3:601)");
    flag<int>(c, "--grid", "grid", "flux tabulation points (default 2001)");
  }
  {
    Command& c = add_command(commands, root, "cauchy", "Godunov finite-volume solve of the scalar law", true);
    flag<double>(c, "--d", "d", "two-lane closed form: d (used without --model)");
    flag<double>(c, "--r", "r", "two-lane closed form: r (used without --model)");
    flag<std::string>(c, "--u0", "u0", "initial field CSV with columns x,u");
    flag<std::string>(c, "--profile", "profile", "initial profile riemann:A:B or constant:C (without --u0)");
    flag<std::string>(c, "--x-range", "x_range", "domain a:b for --profile (default -2:2)");
    flag<double>(c, "--T", "T", "final time");
    flag<double>(c, "--dx", "dx", "cell width (default 0.01; resamples --u0 when given)");
    flag<double>(c, "--cfl", "cfl", "CFL number (default 0.45)");
    flag<int>(c, "--snapshots", "snapshots", "number of equally spaced output times (default 1)");
    flag<int>(c, "--grid", "grid", "flux tabulation points (default 2001)");
  }
  {
    Command& c = add_command(commands, root, "relax", "split-step solve of the lane system with relaxation", true);
    flag<double>(c, "--eps", "eps", "relaxation parameter");
    flag<std::string>(c, "--u0", "u0", "initial lane densities CSV (t,x,lane,rho)");
    flag<std::string>(c, "--profile", "profile", "initial total profile, placed on the manifold (without --u0)");
    flag<std::vector<double>>(c, "--lanes-left", "lanes_left", "off-manifold left lane densities");
    flag<std::vector<double>>(c, "--lanes-right", "lanes_right", "off-manifold right lane densities");
    flag<std::string>(c, "--x-range", "x_range", "domain a:b (default -2:2)");
    flag<double>(c, "--dx", "dx", "cell width (default 0.01)");
    flag<double>(c, "--T", "T", "final time");
    flag<double>(c, "--cfl", "cfl", "CFL number (default 0.45)");
    flag<int>(c, "--snapshots", "snapshots", "number of equally spaced output times (default 1)");
  }
  {
    Command& c = add_command(commands, root, "simulate", "particle system from a local Gibbs state", true);
    flag<std::string>(c, "--profile", "profile", "initial profile riemann:A:B or constant:C");
    flag<double>(c, "--N", "N", "scaling parameter");
    flag<double>(c, "--T", "T", "macroscopic final time (default 1)");
    flag<std::string>(c, "--window", "window", "measured macroscopic window a:b (default -2:2)");
    flag<double>(c, "--bin", "bin", "bin width in sites (default N/10)");
    flag<int>(c, "--snapshots", "snapshots", "number of equally spaced output times (default 1)");
    flag<int>(c, "--replicas", "replicas", "independent replicas to average (default 1)");
  }
  {
    Command& c = add_command(commands, root, "current", "stationary current on a ring", true);
    flag<double>(c, "--rho", "rho", "total density");
    flag<double>(c, "--L", "L", "ring length in sites (default 2000)");
    flag<double>(c, "--T", "T", "microscopic time (default 500)");
    flag<int>(c, "--replicas", "replicas", "replicas (default 16)");
  }
  {
    Command& c = add_command(commands, root, "manylane", "many-lane Riemann study with hill-shaped fluxes", false);
    flag<std::string>(c, "--F", "F", "target flux: logistic, sine or skewed (default logistic)");
    flag<double>(c, "--alpha", "alpha", "left state in [0, 1]");
    flag<double>(c, "--beta", "beta", "right state in [0, 1]");
    flag<std::string>(c, "--n", "n", "comma separated lane counts (default 8,16,32,64)");
    flag<std::string>(c, "--v-range", "v_range", "v grid as a:b:count (default -2:2:801)");
  }
  {
    Command& c = add_command(commands, root, "compare", "compare density CSVs, or run and compare layers", true);
    flag<std::string>(c, "--a", "a", "first density CSV (file mode)");
    flag<std::string>(c, "--b", "b", "second density CSV (file mode)");
    flag<std::string>(c, "--norm", "norm", "l1, linf or both (default l1)");
    flag<std::string>(c, "--layers", "layers", "comma separated layers: particle, pde, relax");
    flag<std::string>(c, "--profile", "profile", "riemann:A:B (layer mode)");
    flag<double>(c, "--N", "N", "particle scaling parameter (default 1000)");
    flag<double>(c, "--T", "T", "final time (default 1)");
    flag<std::string>(c, "--window", "window", "window a:b (default: common domain; -2:2 in layer mode)");
    flag<double>(c, "--bin", "bin", "particle bin width in sites (default N/10)");
    flag<int>(c, "--snapshots", "snapshots", "number of equally spaced times (default 1)");
    flag<int>(c, "--replicas", "replicas", "particle replicas (default 8)");
    flag<double>(c, "--eps", "eps", "relaxation parameter of the relax layer (default 1/N)");
    flag<double>(c, "--dx", "dx", "cell width of the relax layer (default 0.005)");
  }

  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return root.exit(e);
  }

  for (auto& [name, cmd] : commands) {
    if (!cmd.app->parsed()) continue;
    hydro::ExperimentConfig config;
    config.kind = name;
    config.seed = cmd.seed;
    config.output = cmd.output;
    for (auto& collect : cmd.collect) collect(config.params);
    try {
      const hydro::ExperimentResult result = hydro::run_experiment(config);
      for (const auto& artifact : result.artifacts) std::cout << artifact << "\n";
      return result.status;
    } catch (const hydro::Error& e) {
      json diag = {{"error", is_model_error(e.code()) ? "ModelInvalid" : hydro::to_string(e.code())},
                   {"code", hydro::to_string(e.code())},
                   {"message", e.what()}};
      std::cerr << diag.dump() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
      return 3;
    }
  }
  return 1;
}

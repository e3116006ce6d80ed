#include "hydro/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "hydro/equilibrium.hpp"
#include "hydro/error.hpp"
#include "hydro/flux_curve.hpp"
#include "hydro/phase.hpp"
#include "hydro/relaxation.hpp"
#include "hydro/rng.hpp"
#include "hydro/scalar_pde.hpp"

namespace hydro {

namespace {

constexpr const char* kVersion = "hydro 0.1.0";
constexpr std::uint64_t kReplicaStream = 0x3c6ef372fe94f82bULL;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigInvalid, "not a number: \"" + s + "\"");
  }
}

struct Context {
  const ExperimentConfig& cfg;
  json config;
  std::string hash;
  std::uint64_t seed;
  std::vector<std::string> artifacts;
  json inputs = json::object();

  CsvMeta meta(const std::string& schema) const { return {schema, hash, seed}; }
  const json& p() const { return cfg.params; }

  std::string output() const {
    if (cfg.output.empty()) throw Error(ErrorCode::ConfigInvalid, "an output path is required");
    return cfg.output;
  }

  ModelSpec model() {
    if (p().contains("model") && p()["model"].is_string()) {
      const std::string path = p()["model"].get<std::string>();
      ModelSpec spec = load_model(path);
      inputs["model_path"] = path;
      inputs["model"] = model_to_json(spec);
      return spec;
    }
    if (p().contains("model") && p()["model"].is_object()) {
      ModelSpec spec = model_from_json(p()["model"]);
      inputs["model"] = model_to_json(spec);
      return spec;
    }
    throw Error(ErrorCode::ConfigInvalid, "a model is required (--model m.json)");
  }

  template <typename T>
  T get(const char* key, T fallback) const {
    try {
      return p().value(key, fallback);
    } catch (const json::exception&) {
      throw Error(ErrorCode::ConfigInvalid, std::string("bad value for \"") + key + "\"");
    }
  }

  double require(const char* key) const {
    if (!p().contains(key)) throw Error(ErrorCode::ConfigInvalid, std::string("missing parameter \"") + key + "\"");
    return get<double>(key, 0.0);
  }
};

std::vector<double> times_for(double T, int snapshots) {
  std::vector<double> out;
  snapshots = std::max(1, snapshots);
  for (int k = 1; k <= snapshots; ++k) out.push_back(T * k / snapshots);
  return out;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix + ".csv";
  return path.substr(0, dot) + suffix + path.substr(dot);
}

DensityField resample(const DensityField& f, double dx) {
  DensityField out;
  out.x0 = f.x0;
  out.dx = dx;
  out.t = f.t;
  const auto cells = static_cast<Eigen::Index>(std::llround((f.x_end() - f.x0) / dx));
  out.values.resize(cells);
  for (Eigen::Index k = 0; k < cells; ++k) {
    const auto src = std::clamp<Eigen::Index>(static_cast<Eigen::Index>((out.center(k) - f.x0) / f.dx), 0,
                                              f.cells() - 1);
    out.values(k) = f.values(src);
  }
  return out;
}

void run_flux(Context& ctx) {
  const ModelSpec spec = ctx.model();
  const EquilibriumManifold manifold(spec);
  const int grid = ctx.get("grid", 2001);
  const FluxCurve curve = tabulate_flux(manifold, static_cast<std::size_t>(grid));
  CsvWriter out(ctx.output(), ctx.meta("flux"), {"rho", "G", "Gprime_left", "Gprime_right", "Gpp"});
  for (std::size_t k = 0; k < curve.size(); ++k) {
    out.row({curve.grid()[k], curve.values()[k], curve.slope_left()[k], curve.slope_right()[k],
             curve.curvature_values()[k]});
  }
  ctx.artifacts.push_back(ctx.output());
}

void run_phase(Context& ctx) {
  std::vector<double> ds = parse_range(ctx.get<std::string>("d_range", "0.5:3:200"));
  std::vector<double> rs = parse_range(ctx.get<std::string>("r_range", "1:100:200"));
  if (ctx.get("log_r", false)) {
    const double a = std::log(rs.front()), b = std::log(rs.back());
    for (std::size_t k = 0; k < rs.size(); ++k) {
      rs[k] = std::exp(rs.size() > 1 ? a + (b - a) * k / (rs.size() - 1.0) : a);
    }
  }
  CsvWriter out(ctx.output(), ctx.meta("phase"), {"d", "r", "region", "inflexions", "sign_change"});
  for (double d : ds) {
    for (double r : rs) {
      const PhasePoint pt = classify_shape(d, r);
      out.row({format_number(d), format_number(r), to_string(pt.region), std::to_string(pt.inflexions),
               pt.sign_change ? "1" : "0"});
    }
  }
  const std::string curves_path = ctx.get<std::string>("curves_out", sibling_path(ctx.output(), "_curves"));
  CsvWriter curves(curves_path, ctx.meta("phase_curves"), {"d", "r_tilde1", "r_bar1", "r3", "r4", "r_sign"});
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (double d : ds) {
    const auto [dr, unused] = reduce_phase_point(d, 1.0);
    (void)unused;
    const CriticalCurves c = critical_curves(dr);
    curves.row({format_number(d), format_number(c.r_tilde1), opt(c.r_bar1), opt(c.r3), opt(c.r4),
                dr > 1.0 ? format_number(dr / (dr - 1.0)) : std::string()});
  }
  ctx.artifacts.push_back(ctx.output());
  ctx.artifacts.push_back(curves_path);
}

FluxCurve flux_for(Context& ctx) {
  const auto grid = static_cast<std::size_t>(ctx.get("grid", 2001));
  if (ctx.p().contains("model")) return tabulate_flux(EquilibriumManifold(ctx.model()), grid);
  if (ctx.p().contains("d") && ctx.p().contains("r")) {
    return two_lane_curve(ctx.require("d"), ctx.require("r"), grid);
  }
  throw Error(ErrorCode::ConfigInvalid, "a flux is required (--model m.json, or --d and --r)");
}

void run_riemann(Context& ctx) {
  const FluxCurve flux = flux_for(ctx);
  const double alpha = ctx.require("alpha"), beta = ctx.require("beta");
  const double t = ctx.get("t", 1.0);
  if (!(t > 0.0)) throw Error(ErrorCode::ConfigInvalid, "t must be positive");
  const RiemannProblem problem(flux, alpha, beta);
  CsvWriter out(ctx.output(), ctx.meta("riemann"), {"v", "u_minus", "u_plus"});
  for (double v : parse_range(ctx.get<std::string>("v_range", "-3:3:601"))) {
    const OneSidedValue u = problem.at(v * t, t);
    out.row({v, u.minus, u.plus});
  }
  ctx.artifacts.push_back(ctx.output());
}

void write_field(CsvWriter& out, const DensityField& f) {
  for (Eigen::Index k = 0; k < f.cells(); ++k) out.row({f.t, f.center(k), f.values(k)});
}

void run_cauchy(Context& ctx) {
  const FluxCurve flux = flux_for(ctx);
  const double T = ctx.require("T");
  DensityField u0;
  if (ctx.p().contains("u0")) {
    u0 = read_scalar_field(ctx.get<std::string>("u0", ""));
    ctx.inputs["u0"] = ctx.get<std::string>("u0", "");
    if (ctx.p().contains("dx")) u0 = resample(u0, ctx.require("dx"));
  } else {
    const Profile u = parse_profile(ctx.get<std::string>("profile", "riemann:1.5:0.5"));
    const Window w = parse_window(ctx.get<std::string>("x_range", "-2:2"));
    u0 = DensityField::from_function(w.lo, w.hi, ctx.get("dx", 0.01), u);
  }
  CauchyOptions options;
  options.cfl = ctx.get("cfl", 0.45);
  CsvWriter out(ctx.output(), ctx.meta("field"), {"t", "x", "u"});
  write_field(out, u0);
  DensityField u = u0;
  for (double target : times_for(T, ctx.get("snapshots", 1))) {
    u = cauchy_solve(flux, u, target - u.t, options);
    write_field(out, u);
  }
  ctx.artifacts.push_back(ctx.output());
}

LaneSystemState relax_initial(Context& ctx, const ModelSpec& spec, const EquilibriumManifold& manifold) {
  if (ctx.p().contains("u0")) {
    const std::string path = ctx.get<std::string>("u0", "");
    ctx.inputs["u0"] = path;
    return read_lane_state(path, spec.n);
  }
  const Window w = parse_window(ctx.get<std::string>("x_range", "-2:2"));
  const double dx = ctx.get("dx", 0.01);
  if (ctx.p().contains("lanes_left") && ctx.p().contains("lanes_right")) {
    const auto left = ctx.p()["lanes_left"].get<std::vector<double>>();
    const auto right = ctx.p()["lanes_right"].get<std::vector<double>>();
    if (static_cast<int>(left.size()) != spec.n || static_cast<int>(right.size()) != spec.n) {
      throw Error(ErrorCode::ConfigInvalid, "lane data must have one entry per lane");
    }
    LaneSystemState s;
    s.x0 = w.lo;
    s.dx = dx;
    s.rho.resize(static_cast<Eigen::Index>(std::llround((w.hi - w.lo) / dx)), spec.n);
    for (Eigen::Index k = 0; k < s.cells(); ++k) {
      const auto& side = s.center(k) < 0.0 ? left : right;
      for (int i = 0; i < spec.n; ++i) s.rho(k, i) = side[i];
    }
    return s;
  }
  const Profile u = parse_profile(ctx.get<std::string>("profile", "riemann:1.5:0.5"));
  return manifold_state(manifold, DensityField::from_function(w.lo, w.hi, dx, u));
}

void run_relax(Context& ctx) {
  const ModelSpec spec = ctx.model();
  const EquilibriumManifold manifold(spec);
  const double eps = ctx.require("eps"), T = ctx.require("T");
  const LaneSystemState initial = relax_initial(ctx, spec, manifold);
  const auto states = relax_solve(spec, eps, initial, T, ctx.get("cfl", 0.45), times_for(T, ctx.get("snapshots", 1)));
  CsvWriter out(ctx.output(), ctx.meta("density"), {"t", "x", "lane", "rho", "R"});
  write_lane_state(out, initial);
  for (const auto& s : states) write_lane_state(out, s);
  ctx.artifacts.push_back(ctx.output());
}

void write_empirical(CsvWriter& out, const EmpiricalDensity& e, double t) {
  for (std::size_t i = 0; i < e.lanes.size(); ++i) {
    DensityField f = e.lanes[i];
    f.t = t;
    write_density(out, f, std::to_string(i));
  }
  DensityField total = e.total;
  total.t = t;
  write_density(out, total, "total");
}

void run_simulate(Context& ctx) {
  const ModelSpec spec = ctx.model();
  const double N = ctx.require("N"), T = ctx.get("T", 1.0);
  const Profile u = parse_profile(ctx.get<std::string>("profile", "riemann:1.5:0.5"));
  const Window measured = parse_window(ctx.get<std::string>("window", "-2:2"));
  const auto bin = static_cast<std::int64_t>(ctx.get("bin", std::max(1.0, std::round(N / 10.0))));
  const auto run = particle_profile(spec, u, N, times_for(T, ctx.get("snapshots", 1)), measured, bin,
                                    ctx.get("replicas", 1), ctx.seed);
  CsvWriter out(ctx.output(), ctx.meta("density"), {"t", "x", "lane", "rho"});
  for (std::size_t k = 0; k < run.times.size(); ++k) write_empirical(out, run.densities[k], run.times[k]);
  ctx.artifacts.push_back(ctx.output());
}

void run_current(Context& ctx) {
  const ModelSpec spec = ctx.model();
  const double rho = ctx.require("rho");
  const auto L = static_cast<std::int64_t>(ctx.get("L", 2000.0));
  const double T = ctx.get("T", 500.0);
  const int replicas = ctx.get("replicas", 16);
  const CurrentEstimate est = stationary_current(spec, rho, L, T, replicas, ctx.seed);
  const double G = EquilibriumManifold(spec).flux(rho);
  json report = {{"schema", "current"},  {"version", kSchemaVersion}, {"config_hash", ctx.hash},
                 {"seed", ctx.seed},     {"rho", rho},                {"L", L},
                 {"T", T},               {"replicas", replicas},      {"estimate", est.mean},
                 {"stderr", est.stderr_}, {"flux_G", G},               {"per_replica", est.replicas}};
  std::ofstream(ctx.output()) << report.dump(2) << "\n";
  ctx.artifacts.push_back(ctx.output());
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : split(text, ',')) out.push_back(static_cast<int>(to_double(s)));
  if (out.empty()) throw Error(ErrorCode::ConfigInvalid, "empty list");
  return out;
}

void run_manylane(Context& ctx) {
  const std::string name = ctx.get<std::string>("F", "logistic");
  const TargetFlux F = target_flux_by_name(name);
  const double alpha = ctx.require("alpha"), beta = ctx.require("beta");
  const auto ns = parse_int_list(ctx.get<std::string>("n", "8,16,32,64"));
  const auto v = parse_range(ctx.get<std::string>("v_range", "-2:2:801"));
  const ManylaneStudy study = manylane_riemann_study(F, alpha, beta, ns, v);
  CsvWriter out(ctx.output(), ctx.meta("manylane"), {"n", "sup_distance", "exclusion_radius", "points_used"});
  for (const auto& row : study.rows) {
    out.row({std::to_string(row.n), format_number(row.sup_distance), format_number(row.exclusion_radius),
             std::to_string(row.points_used)});
  }
  ctx.artifacts.push_back(ctx.output());
}

DensityField exact_on_grid(const RiemannProblem& problem, const DensityField& like, double t) {
  DensityField f = DensityField::cell_averages(like.x0, like.x_end(), like.dx,
                                               [&](double x) { return problem.value(x, t); }, 8);
  f.t = t;
  return f;
}

void run_compare(Context& ctx) {
  if (ctx.p().contains("a") || ctx.p().contains("b")) {
    std::optional<Window> window;
    if (ctx.p().contains("window")) window = parse_window(ctx.get<std::string>("window", ""));
    const json report = compare_fields(ctx.get<std::string>("a", ""), ctx.get<std::string>("b", ""), window,
                                       ctx.get<std::string>("norm", "l1"));
    std::ofstream(ctx.output()) << report.dump(2) << "\n";
    ctx.artifacts.push_back(ctx.output());
    return;
  }
  // Without --model the layers run on the two-lane model with (d, r) = (0.8, 5).
  const ModelSpec spec = ctx.p().contains("model") ? ctx.model() : two_lane_model(0.8, 0.2, 0.2, 1.0);
  ctx.inputs["model"] = model_to_json(spec);
  const EquilibriumManifold manifold(spec);
  const auto layers = split(ctx.get<std::string>("layers", "particle,pde"), ',');
  const std::string profile_text = ctx.get<std::string>("profile", "riemann:1.5:0.5");
  const auto parts = split(profile_text, ':');
  if (parts.size() != 3 || parts[0] != "riemann") {
    throw Error(ErrorCode::ConfigInvalid, "layer comparison needs a riemann:A:B profile");
  }
  const double alpha = to_double(parts[1]), beta = to_double(parts[2]);
  const double N = ctx.get("N", 1000.0), T = ctx.get("T", 1.0);
  const Window window = parse_window(ctx.get<std::string>("window", "-2:2"));
  const auto bin = static_cast<std::int64_t>(ctx.get("bin", std::max(1.0, std::round(N / 10.0))));
  const auto times = times_for(T, ctx.get("snapshots", 1));
  const FluxCurve flux = tabulate_flux(manifold, 2001);
  const RiemannProblem problem(flux, alpha, beta);

  std::map<std::string, std::vector<DensityField>> fields;
  const double dx = static_cast<double>(bin) / N;
  DensityField grid = DensityField::from_function(window.lo, window.lo + std::floor((window.hi - window.lo) / dx) * dx,
                                                  dx, [](double) { return 0.0; });
  for (const auto& layer : layers) {
    if (layer == "particle") {
      const auto run = particle_profile(spec, parse_profile(profile_text), N, times, window, bin,
                                        ctx.get("replicas", 8), ctx.seed);
      for (const auto& e : run.densities) fields[layer].push_back(e.total);
      grid = run.densities.front().total;
    }
  }
  for (const auto& layer : layers) {
    if (layer == "pde") {
      for (double t : times) fields[layer].push_back(exact_on_grid(problem, grid, t));
    } else if (layer == "relax") {
      const double eps = ctx.get("eps", 1.0 / N);
      const double rdx = ctx.get("dx", 0.005);
      const double margin = propagation_speed(spec) * T;
      LaneSystemState s = manifold_state(
          manifold, DensityField::from_function(window.lo - margin, window.hi + margin, rdx,
                                                [&](double x) { return x < 0.0 ? alpha : beta; }));
      for (const auto& state : relax_solve(spec, eps, s, T, 0.45, times)) fields[layer].push_back(state.total());
    } else if (layer != "particle") {
      throw Error(ErrorCode::ConfigInvalid, "unknown layer \"" + layer + "\"");
    }
  }
  json pairs = json::array();
  for (std::size_t a = 0; a < layers.size(); ++a) {
    for (std::size_t b = a + 1; b < layers.size(); ++b) {
      json l1 = json::array(), linf = json::array();
      for (std::size_t k = 0; k < times.size(); ++k) {
        l1.push_back(l1_distance(fields[layers[a]][k], fields[layers[b]][k], window));
        linf.push_back(linf_distance(fields[layers[a]][k], fields[layers[b]][k], window));
      }
      pairs.push_back({{"a", layers[a]}, {"b", layers[b]}, {"l1", l1}, {"linf", linf}});
    }
  }
  json report = {{"schema", "compare"}, {"version", kSchemaVersion}, {"config_hash", ctx.hash}, {"seed", ctx.seed},
                 {"layers", layers},    {"times", times},            {"window", {window.lo, window.hi}},
                 {"pairs", pairs}};
  std::ofstream(ctx.output()) << report.dump(2) << "\n";
  ctx.artifacts.push_back(ctx.output());
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

Profile parse_profile(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "riemann") {
    return riemann_profile_function(to_double(parts[1]), to_double(parts[2]));
  }
  if (parts.size() == 2 && parts[0] == "constant") return constant_profile(to_double(parts[1]));
  throw Error(ErrorCode::ConfigInvalid, "unknown profile \"" + text + "\" (expected riemann:A:B or constant:C)");
}

std::vector<double> parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw Error(ErrorCode::ConfigInvalid, "range must look like a:b:count");
  const double a = to_double(parts[0]), b = to_double(parts[1]);
  const int k = static_cast<int>(to_double(parts[2]));
  if (k < 1) throw Error(ErrorCode::ConfigInvalid, "range count must be positive");
  std::vector<double> out(k);
  for (int i = 0; i < k; ++i) out[i] = k == 1 ? a : a + (b - a) * i / (k - 1.0);
  return out;
}

Window parse_window(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw Error(ErrorCode::ConfigInvalid, "window must look like a:b");
  Window w{to_double(parts[0]), to_double(parts[1])};
  if (!(w.hi > w.lo)) throw Error(ErrorCode::ConfigInvalid, "window must have positive length");
  return w;
}

TargetFlux target_flux_by_name(const std::string& name) {
  if (name == "logistic") return [](double u) { return u * (1.0 - u); };
  if (name == "sine") return [](double u) { return std::sin(M_PI * u) / M_PI; };
  if (name == "skewed") return [](double u) { return u * u * (1.0 - u); };
  throw Error(ErrorCode::ConfigInvalid, "unknown target flux \"" + name + "\" (logistic, sine, skewed)");
}

ParticleProfileRun particle_profile(const ModelSpec& spec, const Profile& u, double N, const std::vector<double>& times,
                                    const Window& measured, std::int64_t bin_width, int replicas, std::uint64_t seed) {
  if (replicas < 1) throw Error(ErrorCode::ConfigInvalid, "replicas must be positive");
  const EquilibriumManifold manifold(spec);
  const double T = *std::max_element(times.begin(), times.end());
  const double margin = propagation_speed(spec) * T;
  const auto z_lo = static_cast<std::int64_t>(std::floor((measured.lo - margin) * N)) - 1;
  const auto z_hi = static_cast<std::int64_t>(std::ceil((measured.hi + margin) * N)) + 1;
  const double theta = static_cast<double>(
      theta_schedule(static_cast<std::int64_t>(std::llround(N)), spec.theta, coupling_exponents(spec).m_star));
  const auto crop_lo = static_cast<std::int64_t>(std::llround(measured.lo * N));
  const std::int64_t bins = static_cast<std::int64_t>(std::floor((measured.hi - measured.lo) * N / bin_width));
  const std::int64_t crop_hi = crop_lo + bins * bin_width - 1;

  ParticleProfileRun out;
  out.times = times;
  for (int r = 0; r < replicas; ++r) {
    const std::uint64_t replica_seed = counter_hash(seed, kReplicaStream, static_cast<std::uint64_t>(r));
    const ParticleConfiguration cfg = sample_local_gibbs(manifold, u, N, z_lo, z_hi, Boundary::Padded, replica_seed);
    SimulationOptions options;
    options.snapshot_times = times;
    options.measured = measured;
    options.seed = replica_seed;
    const Trajectory tr = simulate(spec, cfg, theta, T, N, options);
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
      const ParticleConfiguration& full = tr.snapshots[k];
      ParticleConfiguration crop = ParticleConfiguration::empty(crop_lo, crop_hi, full.lanes, full.boundary);
      for (std::int64_t z = crop_lo; z <= crop_hi; ++z) {
        for (int i = 0; i < full.lanes; ++i) crop.set(z, i, full.at(z, i));
      }
      EmpiricalDensity e = empirical_density(crop, N, bin_width);
      if (r == 0) {
        out.densities.push_back(e);
        continue;
      }
      auto& acc = out.densities[k];
      for (std::size_t i = 0; i < e.lanes.size(); ++i) acc.lanes[i].values += e.lanes[i].values;
      acc.total.values += e.total.values;
    }
  }
  for (std::size_t k = 0; k < out.densities.size(); ++k) {
    auto& acc = out.densities[k];
    for (auto& lane : acc.lanes) {
      lane.values /= replicas;
      lane.t = times[k];
    }
    acc.total.values /= replicas;
    acc.total.t = times[k];
  }
  return out;
}

json compare_fields(const std::string& a_path, const std::string& b_path, const std::optional<Window>& window,
                    const std::string& norm) {
  if (norm != "l1" && norm != "linf" && norm != "both") {
    throw Error(ErrorCode::ConfigInvalid, "norm must be l1, linf or both");
  }
  const CsvTable a = read_csv(a_path), b = read_csv(b_path);
  const auto sa = a.meta.find("schema"), sb = b.meta.find("schema");
  if (sa != a.meta.end() && sb != b.meta.end() && sa->second != sb->second) {
    throw Error(ErrorCode::SchemaMismatch, "schemas differ: " + sa->second + " vs " + sb->second);
  }
  const auto snaps_a = read_density(a), snaps_b = read_density(b);
  if (snaps_a.size() != snaps_b.size()) throw Error(ErrorCode::SchemaMismatch, "snapshot counts differ");
  const Window w = window.value_or(Window{-std::numeric_limits<double>::infinity(),
                                          std::numeric_limits<double>::infinity()});
  json snapshots = json::array();
  double worst = 0.0;
  bool mismatch_any = false;
  for (std::size_t k = 0; k < snaps_a.size(); ++k) {
    if (std::abs(snaps_a[k].t - snaps_b[k].t) > 1e-9) throw Error(ErrorCode::SchemaMismatch, "snapshot times differ");
    json lanes = json::object();
    for (const auto& [label, fa] : snaps_a[k].lanes) {
      const auto it = snaps_b[k].lanes.find(label);
      if (it == snaps_b[k].lanes.end()) throw Error(ErrorCode::SchemaMismatch, "lane \"" + label + "\" missing");
      json entry;
      const double l1 = l1_distance(fa, it->second, w), linf = linf_distance(fa, it->second, w);
      if (norm != "linf") entry["l1"] = l1;
      if (norm != "l1") entry["linf"] = linf;
      entry["mismatch"] = linf > 1e-12;
      mismatch_any = mismatch_any || linf > 1e-12;
      worst = std::max(worst, norm == "linf" ? linf : l1);
      lanes[label] = entry;
    }
    snapshots.push_back({{"t", snaps_a[k].t}, {"lanes", lanes}});
  }
  return {{"schema", "compare_fields"}, {"version", kSchemaVersion}, {"a", a_path},      {"b", b_path},
          {"norm", norm},               {"snapshots", snapshots},    {"max", worst}, {"identical", !mismatch_any}};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t seed = config.seed;
  if (const char* env = std::getenv("HYDRO_SEED")) {
    try {
      seed = std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigInvalid, "HYDRO_SEED must be an unsigned integer");
    }
  }
  json canonical = {{"kind", config.kind}, {"params", config.params}, {"seed", seed}};
  Context ctx{config, canonical, config_hash(canonical), seed, {}, json::object()};
  const std::string& kind = config.kind;
  if (kind == "flux") {
    run_flux(ctx);
  } else if (kind == "phase") {
    run_phase(ctx);
  } else if (kind == "riemann") {
    run_riemann(ctx);
  } else if (kind == "cauchy") {
    run_cauchy(ctx);
  } else if (kind == "relax") {
    run_relax(ctx);
  } else if (kind == "simulate") {
    run_simulate(ctx);
  } else if (kind == "current") {
    run_current(ctx);
  } else if (kind == "manylane") {
    run_manylane(ctx);
  } else if (kind == "compare") {
    run_compare(ctx);
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown experiment kind \"" + kind + "\"");
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {{"schema_version", kSchemaVersion}, {"version", kVersion},           {"kind", kind},
                   {"config", canonical},              {"config_hash", ctx.hash},       {"seed", seed},
                   {"inputs", ctx.inputs},             {"outputs", ctx.artifacts},      {"wall_time_s", wall},
                   {"timestamp", timestamp()}};
  write_manifest(ctx.output(), manifest);
  ExperimentResult result;
  result.artifacts = ctx.artifacts;
  result.artifacts.push_back(ctx.output() + ".manifest.json");
  result.summary = manifest;
  return result;
}

}  // namespace hydro

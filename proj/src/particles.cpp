#include "hydro/particles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hydro/error.hpp"
#include "hydro/fenwick.hpp"
#include "hydro/rng.hpp"

namespace hydro {

namespace {

constexpr std::uint64_t kGibbsStream = 0x6a09e667f3bcc908ULL;
constexpr std::uint64_t kEventStream = 0xbb67ae8584caa73bULL;

struct Move {
  int dz;
  int lane;
  double cumulative;
};

struct Target {
  bool valid;
  std::int64_t z;
  int lane;
};

// Harris-style event stream acting on one or two copies of the configuration.
class Engine {
 public:
  Engine(const ModelSpec& spec, std::vector<ParticleConfiguration> copies, double theta, double N)
      : copies_(std::move(copies)), n_(spec.n) {
    const auto& base = copies_.front();
    columns_ = base.columns();
    for (const auto& c : copies_) {
      if (c.z_min != base.z_min || c.z_max != base.z_max || c.lanes != spec.n) {
        throw Error(ErrorCode::ConfigInvalid, "configurations must share the window and lane count");
      }
    }
    rate_.resize(n_);
    moves_.resize(n_);
    active_.assign(n_, Fenwick(static_cast<std::size_t>(columns_)));
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      auto push = [&](int dz, int lane, double r) {
        if (r <= 0.0) return;
        acc += r;
        moves_[i].push_back({dz, lane, acc});
      };
      push(1, i, N * spec.d(i));
      push(-1, i, N * spec.l(i));
      for (int j = 0; j < n_; ++j) {
        if (j != i) push(0, j, theta * spec.q(i, j));
      }
      rate_[i] = acc;
      for (std::int64_t k = 0; k < columns_; ++k) {
        if (is_active(k, i)) active_[i].add(static_cast<std::size_t>(k), 1);
      }
    }
  }

  std::vector<ParticleConfiguration>& copies() { return copies_; }

  double total_rate() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += rate_[i] * static_cast<double>(active_[i].total());
    return s;
  }

  Target draw(CounterRng& rng, double total) {
    double u = rng.uniform() * total;
    int lane = n_ - 1;
    for (int i = 0; i < n_; ++i) {
      const double w = rate_[i] * static_cast<double>(active_[i].total());
      if (u < w) {
        lane = i;
        break;
      }
      u -= w;
    }
    while (active_[lane].total() == 0) lane = (lane + n_ - 1) % n_;
    const auto k = active_[lane].find(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(active_[lane].total()))));
    const double pick = rng.uniform() * rate_[lane];
    const auto& table = moves_[lane];
    const Move* move = &table.back();
    for (const auto& m : table) {
      if (pick < m.cumulative) {
        move = &m;
        break;
      }
    }
    from_k_ = static_cast<std::int64_t>(k);
    from_lane_ = lane;
    std::int64_t to = from_k_ + move->dz;
    const auto& base = copies_.front();
    if (to < 0 || to >= columns_) {
      if (base.boundary == Boundary::Padded) return {false, 0, 0};
      to = (to + columns_) % columns_;
    }
    return {true, to, move->lane};
  }

  // Applies the drawn event to every copy; returns a bitmask of copies that moved.
  unsigned apply(const Target& target, std::int64_t& dz_sign) {
    unsigned moved = 0;
    dz_sign = 0;
    if (!target.valid) return 0;
    const std::size_t src = index(from_k_, from_lane_), dst = index(target.z, target.lane);
    const bool was_src = is_active(from_k_, from_lane_), was_dst = is_active(target.z, target.lane);
    for (std::size_t c = 0; c < copies_.size(); ++c) {
      auto& occ = copies_[c].occ;
      if (occ[src] && !occ[dst]) {
        occ[src] = 0;
        occ[dst] = 1;
        moved |= 1u << c;
      }
    }
    if (moved) {
      update_active(from_k_, from_lane_, was_src);
      update_active(target.z, target.lane, was_dst);
      if (target.lane == from_lane_) {
        const std::int64_t diff = target.z - from_k_;
        dz_sign = diff == 1 || diff == -(columns_ - 1) ? 1 : -1;
      }
    }
    return moved;
  }

  std::int64_t active_total() const {
    std::int64_t s = 0;
    for (const auto& f : active_) s += f.total();
    return s;
  }

  std::int64_t source_column() const { return from_k_; }
  int source_lane() const { return from_lane_; }
  std::size_t index(std::int64_t k, int i) const { return static_cast<std::size_t>(k * n_ + i); }

  std::int64_t particle_count(std::size_t c) const {
    return std::count(copies_[c].occ.begin(), copies_[c].occ.end(), std::uint8_t{1});
  }

 private:
  bool is_active(std::int64_t k, int i) const {
    for (const auto& c : copies_) {
      if (c.occ[index(k, i)]) return true;
    }
    return false;
  }

  void update_active(std::int64_t k, int i, bool before) {
    const bool now = is_active(k, i);
    if (now != before) active_[i].add(static_cast<std::size_t>(k), now ? 1 : -1);
  }

  std::vector<ParticleConfiguration> copies_;
  int n_;
  std::int64_t columns_ = 0;
  std::vector<double> rate_;
  std::vector<std::vector<Move>> moves_;
  std::vector<Fenwick> active_;
  std::int64_t from_k_ = 0;
  int from_lane_ = 0;
};

}  // namespace

ParticleConfiguration ParticleConfiguration::empty(std::int64_t z_min, std::int64_t z_max, int lanes,
                                                   Boundary boundary) {
  ParticleConfiguration c;
  c.z_min = z_min;
  c.z_max = z_max;
  c.lanes = lanes;
  c.boundary = boundary;
  c.occ.assign(static_cast<std::size_t>((z_max - z_min + 1) * lanes), 0);
  return c;
}

std::int64_t ParticleConfiguration::particles() const { return std::count(occ.begin(), occ.end(), std::uint8_t{1}); }

Profile riemann_profile_function(double alpha, double beta) {
  return [alpha, beta](double x) { return x < 0.0 ? alpha : beta; };
}

Profile constant_profile(double rho) {
  return [rho](double) { return rho; };
}

namespace {

void fill_gibbs(const EquilibriumManifold& manifold, const Profile& u, double N, ParticleConfiguration& cfg,
                std::uint64_t seed) {
  const int n = manifold.lanes();
  double cached_u = std::nan("");
  Eigen::VectorXd rho;
  for (std::int64_t z = cfg.z_min; z <= cfg.z_max; ++z) {
    const double value = u(static_cast<double>(z) / N);
    if (!(value >= 0.0 && value <= n)) {
      std::ostringstream msg;
      msg << "profile value " << value << " at x = " << static_cast<double>(z) / N << " outside [0, " << n << "]";
      throw Error(ErrorCode::ProfileOutOfRange, msg.str());
    }
    if (!(value == cached_u)) {
      rho = manifold.point(value);
      cached_u = value;
    }
    for (int i = 0; i < n; ++i) {
      const auto key = static_cast<std::uint64_t>(z) * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i);
      cfg.set(z, i, CounterRng::uniform_at(seed, kGibbsStream, key) < rho(i));
    }
  }
}

}  // namespace

ParticleConfiguration sample_local_gibbs(const EquilibriumManifold& manifold, const Profile& u, double N,
                                         std::int64_t z_min, std::int64_t z_max, Boundary boundary,
                                         std::uint64_t seed) {
  ParticleConfiguration cfg = ParticleConfiguration::empty(z_min, z_max, manifold.lanes(), boundary);
  cfg.seed = seed;
  fill_gibbs(manifold, u, N, cfg, seed);
  cfg.pad_left = u(static_cast<double>(z_min - 1) / N);
  cfg.pad_right = u(static_cast<double>(z_max + 1) / N);
  return cfg;
}

CoupledPair sample_coupled_gibbs(const EquilibriumManifold& manifold, const Profile& u, const Profile& v, double N,
                                 std::int64_t z_min, std::int64_t z_max, Boundary boundary, std::uint64_t seed) {
  return {sample_local_gibbs(manifold, u, N, z_min, z_max, boundary, seed),
          sample_local_gibbs(manifold, v, N, z_min, z_max, boundary, seed)};
}

double propagation_speed(const ModelSpec& spec) { return 2.0 * (spec.d + spec.l).maxCoeff(); }

void check_measurement_window(const ModelSpec& spec, const ParticleConfiguration& cfg, double N, double T,
                              const Window& measured) {
  if (cfg.boundary == Boundary::Periodic) return;
  const double reach = propagation_speed(spec) * T;
  const double safe_lo = static_cast<double>(cfg.z_min) / N + reach;
  const double safe_hi = static_cast<double>(cfg.z_max) / N - reach;
  if (measured.lo < safe_lo || measured.hi > safe_hi) {
    std::ostringstream msg;
    msg << "measured window [" << measured.lo << ", " << measured.hi << "] exceeds the safe sub-window [" << safe_lo
        << ", " << safe_hi << "]";
    throw Error(ErrorCode::WindowTooSmall, msg.str());
  }
}

Trajectory simulate(const ModelSpec& spec, const ParticleConfiguration& cfg, double theta, double T, double N,
                    const SimulationOptions& options) {
  if (!(theta >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "theta must be nonnegative");
  if (options.measured) check_measurement_window(spec, cfg, N, T, *options.measured);
  Engine engine(spec, {cfg}, theta, N);
  CounterRng rng(options.seed, kEventStream);
  std::vector<double> snaps = options.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next = 0;
  Trajectory out;
  const std::int64_t mass = engine.particle_count(0);
  double t = 0.0;
  while (true) {
    if (options.max_events > 0 && out.events >= options.max_events) break;
    const double total = engine.total_rate();
    const double nt = total > 0.0 ? t + rng.exponential(total) : INFINITY;
    while (next < snaps.size() && snaps[next] < nt && snaps[next] <= T) {
      out.times.push_back(snaps[next++]);
      out.snapshots.push_back(engine.copies()[0]);
    }
    if (nt > T) {
      t = T;
      break;
    }
    t = nt;
    const Target target = engine.draw(rng, total);
    std::int64_t dz = 0;
    if (engine.apply(target, dz)) {
      ++out.accepted;
      if (dz > 0) ++out.right_jumps;
      if (dz < 0) ++out.left_jumps;
    }
    ++out.events;
    if (engine.active_total() != mass) ++out.mass_violations;
  }
  while (next < snaps.size() && snaps[next] <= T) {
    out.times.push_back(snaps[next++]);
    out.snapshots.push_back(engine.copies()[0]);
  }
  if (engine.particle_count(0) != mass) ++out.mass_violations;
  out.final_time = t;
  return out;
}

EmpiricalDensity empirical_density(const ParticleConfiguration& cfg, double N, std::int64_t bin_width) {
  if (bin_width < 1) throw Error(ErrorCode::ConfigInvalid, "bin width must be at least one site");
  const std::int64_t bins = cfg.columns() / bin_width;
  EmpiricalDensity out;
  DensityField proto;
  proto.x0 = (static_cast<double>(cfg.z_min) - 0.5) / N;
  proto.dx = static_cast<double>(bin_width) / N;
  proto.values = Eigen::ArrayXd::Zero(bins);
  out.lanes.assign(cfg.lanes, proto);
  out.total = proto;
  for (std::int64_t b = 0; b < bins; ++b) {
    for (std::int64_t s = 0; s < bin_width; ++s) {
      const std::int64_t z = cfg.z_min + b * bin_width + s;
      for (int i = 0; i < cfg.lanes; ++i) out.lanes[i].values(b) += cfg.at(z, i);
    }
  }
  for (auto& lane : out.lanes) {
    lane.values /= static_cast<double>(bin_width);
    out.total.values += lane.values;
  }
  return out;
}

CurrentEstimate stationary_current(const ModelSpec& spec, double rho, std::int64_t L, double T, int replicas,
                                   std::uint64_t seed, double theta) {
  const EquilibriumManifold manifold(spec);
  CurrentEstimate out;
  for (int r = 0; r < replicas; ++r) {
    const std::uint64_t replica_seed = counter_hash(seed, 0x243f6a8885a308d3ULL, static_cast<std::uint64_t>(r));
    const ParticleConfiguration cfg =
        sample_local_gibbs(manifold, constant_profile(rho), 1.0, 0, L - 1, Boundary::Periodic, replica_seed);
    SimulationOptions options;
    options.seed = replica_seed;
    const Trajectory tr = simulate(spec, cfg, theta, T, 1.0, options);
    out.replicas.push_back(static_cast<double>(tr.right_jumps - tr.left_jumps) / (static_cast<double>(L) * T));
  }
  const double R = static_cast<double>(replicas);
  for (double x : out.replicas) out.mean += x / R;
  if (replicas > 1) {
    double var = 0.0;
    for (double x : out.replicas) var += (x - out.mean) * (x - out.mean);
    var /= (R - 1.0);
    out.stderr_ = std::sqrt(var / R);
  }
  return out;
}

std::int64_t partial_sum_statistic(const ParticleConfiguration& eta, const ParticleConfiguration& xi) {
  std::int64_t running = 0, sup = 0;
  for (std::int64_t z = eta.z_max; z >= eta.z_min; --z) {
    for (int i = 0; i < eta.lanes; ++i) running += static_cast<int>(eta.at(z, i)) - static_cast<int>(xi.at(z, i));
    sup = std::max(sup, std::abs(running));
  }
  return sup;
}

CoupledTrajectory coupled_simulate(const ModelSpec& spec, const ParticleConfiguration& eta0,
                                   const ParticleConfiguration& xi0, double theta, double T, double N,
                                   const CoupledOptions& options) {
  Engine engine(spec, {eta0, xi0}, theta, N);
  CounterRng rng(options.seed, kEventStream);
  CoupledTrajectory out;
  auto& copies = engine.copies();
  const auto& eta = copies[0].occ;
  const auto& xi = copies[1].occ;
  std::int64_t d_plus = 0, d_minus = 0;
  bool ordered = true;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    d_plus += eta[k] > xi[k];
    d_minus += eta[k] < xi[k];
    ordered = ordered && eta[k] <= xi[k];
  }
  out.initially_ordered = ordered;
  std::vector<double> records = options.record_times;
  std::sort(records.begin(), records.end());
  std::size_t next = 0;
  auto record = [&](double when) {
    out.times.push_back(when);
    out.d_plus.push_back(d_plus);
    out.d_minus.push_back(d_minus);
    const std::int64_t s = partial_sum_statistic(copies[0], copies[1]);
    out.partial_sum.push_back(s);
    out.sup_partial_sum = std::max(out.sup_partial_sum, s);
  };
  auto local = [&](std::size_t k, int& plus, int& minus) {
    plus += eta[k] > xi[k];
    minus += eta[k] < xi[k];
  };
  double t = 0.0;
  while (true) {
    if (options.max_events > 0 && out.events >= options.max_events) break;
    const double total = engine.total_rate();
    const double nt = total > 0.0 ? t + rng.exponential(total) : INFINITY;
    while (next < records.size() && records[next] < nt && records[next] <= T) record(records[next++]);
    if (nt > T) {
      t = T;
      break;
    }
    t = nt;
    const Target target = engine.draw(rng, total);
    ++out.events;
    if (!target.valid) continue;
    const std::size_t src = engine.index(engine.source_column(), engine.source_lane());
    const std::size_t dst = engine.index(target.z, target.lane);
    int p0 = 0, m0 = 0, p1 = 0, m1 = 0;
    local(src, p0, m0);
    local(dst, p0, m0);
    std::int64_t dz = 0;
    engine.apply(target, dz);
    local(src, p1, m1);
    local(dst, p1, m1);
    const int dp = p1 - p0, dm = m1 - m0;
    if (dp > 0 || dm > 0 || dp != dm) ++out.discrepancy_violations;
    if (dp < 0) ++out.coalescences;
    d_plus += dp;
    d_minus += dm;
    if (ordered && (eta[src] > xi[src] || eta[dst] > xi[dst])) ++out.order_violations;
  }
  while (next < records.size() && records[next] <= T) record(records[next++]);
  if (out.times.empty() || out.times.back() != t) record(t);
  out.final_state = {copies[0], copies[1]};
  out.final_time = t;
  return out;
}

}  // namespace hydro

#pragma once

#include <cmath>
#include <cstdint>

namespace hydro {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Stateless generator: draw k of stream s under seed is a pure function of (seed, s, k).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t next() { return counter_hash(seed_, stream_, counter_++); }
  double uniform() { return to_unit(next()); }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  std::uint64_t below(std::uint64_t bound) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)) % bound; }
  std::uint64_t counter() const { return counter_; }

  static double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return to_unit(counter_hash(seed, stream, index));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace hydro

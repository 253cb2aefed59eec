#ifndef ARCNC_RNG_HPP
#define ARCNC_RNG_HPP

#include <cstdint>
#include <random>

#include "arcnc/gf.hpp"

namespace arcnc {

/// SplitMix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of trial `trial` under `base`: splitmix64(base ^ splitmix64(trial)).
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
  return splitmix64(base ^ splitmix64(trial));
}

/// Independent sub-stream of a trial seed (0: kernel coefficients,
/// 1: source messages).
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed + 0xD1B54A32D192ED03ull * (stream + 1));
}

/// mt19937_64 with a portable uniform draw (rejection sampling instead of
/// std::uniform_int_distribution, whose output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do r = engine_();
    while (r >= limit);
    return r % bound;
  }

  Elem element(const Field& f) { return static_cast<Elem>(below(f.order())); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace arcnc

#endif  // ARCNC_RNG_HPP

#pragma once

#include <cmath>
#include <cstdint>

#include "stabidx/box.hpp"

namespace stabidx {

/// splitmix64 step; used to derive independent stream seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0xa0761d6478bd642fULL * (stream + 1));
  return splitmix64(s);
}

/// xoshiro256** generator. Sequences are fixed by the algorithm, so seeded
/// draws reproduce across platforms and standard-library versions (the
/// <random> distributions give no such guarantee).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi], inclusive; rejection-sampled, so exact.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= bound);
    return lo + static_cast<std::int64_t>(draw % range);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Box-Muller transform; two uniforms per draw keeps the stream stateless.
  double gaussian(double mean = 0.0, double sigma = 1.0) {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4] = {};
};

}  // namespace stabidx

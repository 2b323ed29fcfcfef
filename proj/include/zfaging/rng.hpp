#pragma once

// Counter-based stream derivation: every Monte-Carlo trial gets its own
// xoshiro256** generator keyed by (seed, trial index), so results do not
// depend on how trials are split between workers.

#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace zfaging {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
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

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

/// Independent generator for trial `index` under `seed`.
inline Xoshiro256 trial_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t a = seed;
  std::uint64_t key = splitmix64(a);
  key ^= index * 0xD1B54A32D192ED03ULL;
  std::uint64_t b = key;
  return Xoshiro256(splitmix64(b));
}

/// Circularly-symmetric complex Gaussian with the given variance.
class ComplexNormal {
 public:
  template <class Rng>
  std::complex<double> operator()(Rng& rng, double variance = 1.0) {
    const double s = std::sqrt(0.5 * variance);
    const double re = normal_(rng);
    const double im = normal_(rng);
    return {s * re, s * im};
  }

 private:
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace zfaging

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace recobert {

/// Seeded generator with portable derived distributions. The standard library
/// distributions are implementation-defined, so everything that feeds a
/// reproducible artifact goes through these helpers instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Standard normal resampled until it lies within +-2, then scaled so the
  /// truncated distribution itself has standard deviation `stddev`.
  double truncated_normal(double stddev) {
    // std of N(0,1) truncated to [-2, 2]
    constexpr double kTruncatedStd = 0.8796256610342398;
    double z;
    do {
      z = normal();
    } while (std::abs(z) > 2.0);
    return z * (stddev / kTruncatedStd);
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix_seed(seed ^ tag);
}

}  // namespace recobert

#pragma once

#include <cmath>
#include <cstdint>

#include "biodose/errors.hpp"

namespace biodose {

/// Counter-based pseudo-random stream (splitmix64 finalizer over a keyed
/// counter). Two properties matter here:
///   - a stream is fully determined by (seed, stream index), so Monte Carlo
///     loops can derive one independent stream per sample or repetition and
///     results cannot depend on scheduling;
///   - the sequence is reproducible bit for bit across platforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed) ^ (0x9E3779B97F4A7C15ULL * (stream + 1)))) {}

  /// Independent stream for one Monte Carlo sample / repetition.
  static CounterRng substream(std::uint64_t seed, std::uint64_t index) {
    return CounterRng(seed, index);
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller (first branch only, deterministic).
  double gaussian() {
    double u1 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

  /// Gamma(shape k, rate z) via Marsaglia-Tsang; mean = k/z.
  double gamma(double k, double z) {
    if (k <= 0.0 || z <= 0.0) throw ValidationError("gamma sampler requires k > 0 and z > 0");
    if (k < 1.0) {
      const double u = uniform01();
      return gamma(k + 1.0, z) * std::pow(u > 0 ? u : 1e-300, 1.0 / k);
    }
    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = gaussian();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / z;
      if (u > 0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / z;
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace biodose

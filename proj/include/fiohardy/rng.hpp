#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fiohardy {

// Stateless counter-based generator built on the splitmix64 mixer.
//
// Every draw is a pure function of (seed, stream, counter), so results do not
// depend on evaluation order and identical seeds reproduce identical samples
// even if the surrounding loops are restructured or sharded.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x5851F42D4C957F2DULL))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + counter * 0x9E3779B97F4A7C15ULL);
  }

  // Second independent 64-bit value for the same counter.
  std::uint64_t bits2(std::uint64_t counter) const {
    return mix(key_ ^ 0xD2B74407B1CE6E93ULL ^ mix(counter + 0x8CB92BA72F3D8DD7ULL));
  }

  // Uniform in [0, 1).
  double uniform(std::uint64_t counter) const { return to_unit(bits(counter)); }

  double uniform(std::uint64_t counter, double a, double b) const {
    return a + (b - a) * uniform(counter);
  }

  // Uniform over {0, ..., n-1} (n > 0); negligible modulo bias for n << 2^64.
  std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
    return bits(counter) % n;
  }

  // Pair of independent standard normal values (Box-Muller).
  std::array<double, 2> gaussian_pair(std::uint64_t counter) const {
    const double u1 = (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = to_unit(bits2(counter));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

  // Log-uniform in [a, b], a, b > 0.
  double log_uniform(std::uint64_t counter, double a, double b) const {
    return a * std::exp(uniform(counter) * std::log(b / a));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static double to_unit(std::uint64_t v) {
    return static_cast<double>(v >> 11) * 0x1.0p-53;
  }

  std::uint64_t key_;
};

}  // namespace fiohardy

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cpsgen::rng {

inline constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x00000100000001b3ull;

inline std::uint64_t fnv1a64_bytes(const void* data, std::size_t n,
                                   std::uint64_t h = kFnvBasis) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvBasis) {
  return fnv1a64_bytes(s.data(), s.size(), h);
}

/// Deterministic random stream derived from (scenario seed, stream name).
/// Each consumer owns a named stream so that adding draws in one place never
/// shifts the sequence seen by another. Gaussians come from a hand-rolled
/// Box-Muller transform; std::normal_distribution is implementation-defined
/// and would break cross-toolchain reproducibility.
class Stream {
 public:
  Stream(std::uint64_t scenario_seed, std::string_view name)
      : gen_(scenario_seed ^ fnv1a64(name)) {}

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? gen_() % n : 0; }

  /// One sample of N(0, stddev). Draws exactly two uniforms per call.
  double gaussian(double stddev) {
    if (stddev == 0.0) {
      gen_();
      gen_();
      return 0.0;
    }
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return stddev * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cpsgen::rng

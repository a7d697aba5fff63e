#pragma once

#include <cstdint>
#include <random>

namespace stg {

/// SplitMix64 finalizer. Used for all seed derivation so that child
/// streams are decorrelated and the mapping is frozen across releases.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives a child seed from (seed, a, b). The constants above are part
/// of the file-format/reproducibility contract: records written with a
/// master seed stay replayable.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ mix64(a));
  h = mix64(h ^ mix64(b));
  return h;
}

double inverse_normal_cdf(double p);  // defined in normal.cpp

/// Deterministic random stream. Normal deviates go through the inverse
/// CDF rather than std::normal_distribution, whose algorithm is
/// implementation-defined; with a fixed seed the output is the same on
/// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1); safe as an inverse-CDF argument.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return inverse_normal_cdf(uniform_open()); }

  /// Unbiased integer in [0, bound).
  std::uint64_t integer(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stg

#pragma once

// Reproducible random streams.
//
// Generator: xoshiro256** (Blackman & Vigna), state seeded by four successive
// SplitMix64 outputs. Stream keys are folded through the SplitMix64 finalizer,
// so every (base_seed, a, b) triple names an independent, platform-stable
// stream. Nothing here touches std::random_device or distribution classes from
// <random>, whose output is implementation-defined.

#include <array>
#include <cstdint>
#include <limits>

namespace modeest {

/// SplitMix64 finalizer (a bijective 64-bit mix).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Stream key for replication `b` of configuration `a` under `base_seed`.
/// The chain is base -> mix(base + G) -> mix(h ^ a + G) -> mix(h ^ b + G),
/// G being the SplitMix64 increment.
constexpr std::uint64_t derive_stream(std::uint64_t base_seed, std::uint64_t a,
                                      std::uint64_t b) noexcept {
  constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t h = mix64(base_seed + golden);
  h = mix64((h ^ a) + golden);
  h = mix64((h ^ b) + golden);
  return h;
}

/// xoshiro256**. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }
  std::uint64_t next() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject). bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Standard normal variate, Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  /// Gamma(shape, scale) variate, Marsaglia-Tsang squeeze. For shape < 1 the
  /// shape+1 variate is multiplied by U^(1/shape).
  double gamma(double shape, double scale) noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace modeest

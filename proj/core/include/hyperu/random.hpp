#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hyperu {

/// SplitMix64, used only to expand seeds into generator state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  std::uint64_t next() noexcept;

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna). Satisfies
/// UniformRandomBitGenerator and supports jump-ahead by 2^128 steps.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept;
  explicit Xoshiro256(const std::array<std::uint64_t, 4>& state) noexcept : s_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Advances the state by 2^128 draws.
  void jump() noexcept;

  const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Independent generator for replicate `stream` of a run seeded with `seed`.
/// Streams depend only on (seed, stream), never on scheduling.
Xoshiro256 make_stream(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Seed for a child computation, derived from a parent seed and a tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Xoshiro256& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace hyperu

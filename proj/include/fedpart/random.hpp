#pragma once

#include <cstdint>
#include <random>

namespace fedpart {

/// Seeded generator used for every stochastic step.
///
/// Algorithm "mt19937_64/v1": std::mt19937_64 seeded with the 64-bit seed,
/// doubles formed from the top 53 bits of one draw. Both steps are fully
/// specified by the standard, so golden outputs do not depend on the
/// toolchain (unlike std::uniform_real_distribution).
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed for repetition `rep` of a run seeded
/// with `seed` (splitmix64 finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (rep + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace fedpart

#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace metasched {

/// Seeded generator with platform-independent output. std::mt19937_64's raw
/// stream is fixed by the standard, but the <random> distributions are not, so
/// the conversions to uniform / normal / index draws live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

  /// Standard normal via the Box-Muller transform.
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// SplitMix64 mix of (seed, stream) used to derive independent sub-seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace metasched

#pragma once

#include <cstdint>
#include <limits>

namespace vfsl {

/// SplitMix64 step; used to expand a single seed into generator state.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256** seeded through SplitMix64.
///
/// All derived draws (uniform doubles, bounded integers, Gaussians) are
/// computed here rather than through <random> distributions so that streams
/// are identical across standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via the Marsaglia polar method.
  double gaussian() noexcept;

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vfsl

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

namespace rfamado {

/// SplitMix64 generator (Steele, Lea & Flood 2014): 64-bit state, one
/// Weyl increment plus a variant-13 finalizer per draw. Chosen over the
/// standard engines because every derived quantity (uniforms, bounded
/// integers, exponentials) is defined here and therefore identical across
/// standard-library implementations.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), unbiased by rejection.
  std::uint64_t bounded(std::uint64_t bound) noexcept;

  /// Standard exponential variate.
  double exponential() noexcept;

 private:
  std::uint64_t state_;
};

/// Mixes a base seed with a string key (FNV-1a 64 of the key, then one
/// SplitMix64 step). Used for per-point and per-cluster streams so that
/// generation order never affects the draws.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept;

/// In-place Fisher-Yates shuffle driven by `rng.bounded`.
template <typename T>
void fisher_yates_shuffle(std::span<T> values, SplitMix64& rng) noexcept {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace rfamado

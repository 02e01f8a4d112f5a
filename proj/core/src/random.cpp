#include "rfamado/random.hpp"

#include <cmath>

namespace rfamado {

std::uint64_t SplitMix64::bounded(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  // Reject the low 2^64 mod bound draws so the modulo is unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % bound;
  }
}

double SplitMix64::exponential() noexcept { return -std::log(uniform_open()); }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char ch : key) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  SplitMix64 mix(seed ^ h);
  return mix();
}

}  // namespace rfamado

#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace elex {

using Rng = std::mt19937_64;

/// One SplitMix64 step: returns the next output and advances the state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for substream `index` of `master`. Every randomized component draws
/// from its own stream derived this way, so results never depend on how work
/// is split across workers.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  splitmix64(s);
  splitmix64(s);
  return splitmix64(s);
}

/// Uniform double in [0, 1) built from the top 53 bits, so the value depends
/// only on the generator output and not on library internals.
inline double canonical_double(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n) via masked rejection.
inline std::uint64_t bounded_uint64(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("bounded_uint64: empty range");
  std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(n | 1);
  for (;;) {
    std::uint64_t v = rng() & mask;
    if (v < n) return v;
  }
}

/// In-place Fisher-Yates shuffle driven by bounded_uint64.
template <typename T>
void shuffle_values(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded_uint64(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

/// `count` distinct values drawn uniformly from [lo, hi], returned sorted.
/// Returns the whole range when it has at most `count` elements.
std::vector<std::int64_t> sample_without_replacement(std::int64_t lo, std::int64_t hi,
                                                     std::size_t count, std::uint64_t seed);

}  // namespace elex

#include "elex/random.hpp"

#include <algorithm>
#include <unordered_set>

namespace elex {

std::vector<std::int64_t> sample_without_replacement(std::int64_t lo, std::int64_t hi,
                                                     std::size_t count, std::uint64_t seed) {
  std::vector<std::int64_t> out;
  if (hi < lo) return out;
  std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range <= count) {
    out.reserve(range);
    for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  // Floyd's sampling: each iteration adds exactly one distinct value.
  Rng rng(seed);
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(count * 2);
  for (std::uint64_t j = range - count; j < range; ++j) {
    std::int64_t t = lo + static_cast<std::int64_t>(bounded_uint64(rng, j + 1));
    if (!chosen.insert(t).second) chosen.insert(lo + static_cast<std::int64_t>(j));
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace elex

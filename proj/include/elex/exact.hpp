#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "elex/objectives.hpp"

namespace elex {

struct OracleOptions {
  /// Refuse to enumerate more candidate sets than this.
  std::uint64_t enumeration_cap = 2'000'000;
  int threads = 1;
  /// When set, the success test becomes margin >= this value instead of
  /// required_margin(problem); only meaningful for the pov objective.
  std::optional<std::int64_t> pov_margin_override;
};

struct OracleResult {
  std::vector<NodeId> best_set;
  double best_value = 0.0;      // mean margin (mov) or winning fraction (pov)
  std::int64_t best_total = 0;  // exact integer total over the batch
  std::uint64_t enumerated = 0; // candidate sets evaluated
};

/// Σ_{j<=k} C(n, j), saturating at 2^64-1; the number of sets brute_force
/// would evaluate.
std::uint64_t subset_count(NodeId n, std::size_t k);

/// Exact maximizer of the sample-average objective over every seed set of
/// size at most k, ties resolved toward the lexicographically smallest set
/// (the empty set precedes everything). Throws when subset_count exceeds
/// options.enumeration_cap, naming the required count. The result value is
/// recomputed through the direct per-scenario evaluation as a self-check.
OracleResult brute_force(const ControlProblem& problem, const ScenarioBatch& batch, std::size_t k,
                         ObjectiveKind kind, const OracleOptions& options = {});

}  // namespace elex

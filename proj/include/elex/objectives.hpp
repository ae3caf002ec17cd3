#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "elex/cascade.hpp"
#include "elex/election.hpp"

namespace elex {

enum class ObjectiveKind { mov, pov };

std::string_view to_string(ObjectiveKind kind);
ObjectiveKind objective_from_string(std::string_view name);

/// Sample-average estimate of an objective for a fixed seed set.
struct ObjectiveEstimate {
  ObjectiveKind kind = ObjectiveKind::mov;
  Mode mode = Mode::constructive;
  double mean = 0.0;
  double std_error = 0.0;       // 0 when the value is exact or r < 2
  std::size_t scenario_count = 0;
  std::vector<NodeId> seed_set;
};

/// Per-(profile, mode) voter masks and tally offsets. Given the influenced
/// node set of one scenario, the margin gained for candidate 0 is a handful
/// of popcounts:
///
///   margin = f + min over rivals j of (f_j + offset_j)   (constructive)
///   margin = f + max over rivals j of (f_j + offset_j)   (destructive)
///
/// where f counts influenced voters in the relevant set (second-choice
/// supporters of candidate 0 when promoting, first-choice supporters when
/// demoting), f_j counts the influenced overlap with rival j's crucial set,
/// and offset_j corrects for rival j's starting tally. Rival terms never go
/// below zero overall, and with a single rival the margin collapses to 2f.
class MarginEvaluator {
 public:
  MarginEvaluator(const PreferenceProfile& profile, Mode mode);

  std::int64_t margin_from_reached(const DynamicBitset& reached) const;
  std::int64_t margin(const DirectedGraph& graph, const Scenario& scenario,
                      std::span<const NodeId> seeds) const;

  /// Margin gained against rival j alone, from an influenced node set.
  std::int64_t g_from_reached(const DynamicBitset& reached, CandidateId rival) const;

  Mode mode() const { return mode_; }
  CandidateId rival_count() const { return static_cast<CandidateId>(overlap_.size()); }
  /// The voter set whose reach drives the objective.
  const DynamicBitset& relevant() const { return relevant_; }
  const DynamicBitset& rival_overlap(CandidateId rival) const;
  std::int64_t rival_offset(CandidateId rival) const;

 private:
  Mode mode_;
  DynamicBitset relevant_;
  std::vector<DynamicBitset> overlap_;  // indexed by rival - 1
  std::vector<std::int64_t> offset_;
};

/// Margin gained against rival c alone when promoting candidate 0.
std::int64_t g_constructive(const ControlProblem& problem, std::span<const NodeId> seeds,
                            const Scenario& scenario, CandidateId rival);
/// Margin gained against rival c alone when demoting candidate 0.
std::int64_t g_destructive(const ControlProblem& problem, std::span<const NodeId> seeds,
                           const Scenario& scenario, CandidateId rival);

/// Worst-case margin over all rivals in one scenario (promotion).
std::int64_t margin_constructive(const ControlProblem& problem, std::span<const NodeId> seeds,
                                 const Scenario& scenario);
/// Best achievable rival lead over candidate 0's supporters in one scenario
/// (demotion).
std::int64_t margin_destructive(const ControlProblem& problem, std::span<const NodeId> seeds,
                                const Scenario& scenario);

/// Mean margin over the batch, with its standard error.
ObjectiveEstimate estimate_mov(const ControlProblem& problem, std::span<const NodeId> seeds,
                               const ScenarioBatch& batch);

/// Fraction of scenarios whose margin meets required_margin(problem).
/// Exactly 1 when the required margin is nonpositive (candidate 0 already
/// wins), without touching the batch.
ObjectiveEstimate estimate_pov(const ControlProblem& problem, std::span<const NodeId> seeds,
                               const ScenarioBatch& batch);

}  // namespace elex

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "elex/objectives.hpp"

namespace elex {

/// Marginal-gain interface consumed by lazy_greedy. Values are integer totals
/// over the scenario batch (never divided by r) so ties are exact.
class MarginalOracle {
 public:
  /// Per-worker scratch space; gain() must be safe to call concurrently as
  /// long as each caller passes its own scratch.
  class Scratch {
   public:
    virtual ~Scratch() = default;
  };

  virtual ~MarginalOracle() = default;
  virtual std::unique_ptr<Scratch> make_scratch() const = 0;
  /// h(S ∪ {v}) - h(S) for the currently committed set S.
  virtual std::int64_t gain(NodeId v, Scratch& scratch) const = 0;
  /// S <- S ∪ {v}.
  virtual void commit(NodeId v) = 0;
  /// h(S).
  virtual std::int64_t value() const = 0;
};

/// Adapts a plain set function h(S); recomputes from scratch on every call.
/// Handy for tests and small experiments, not for production-sized runs.
class FunctionOracle final : public MarginalOracle {
 public:
  explicit FunctionOracle(std::function<std::int64_t(const std::vector<NodeId>&)> fn);

  std::unique_ptr<Scratch> make_scratch() const override;
  std::int64_t gain(NodeId v, Scratch& scratch) const override;
  void commit(NodeId v) override;
  std::int64_t value() const override { return current_value_; }

 private:
  std::function<std::int64_t(const std::vector<NodeId>&)> fn_;
  std::vector<NodeId> current_;
  std::int64_t current_value_ = 0;
};

/// Batch total of Σ_y min(cap, |reach(S, y) ∩ targets|); cap = no_cap()
/// disables capping. Tracks the influenced set per scenario so a marginal
/// gain only explores newly reached nodes, and drops scenarios whose count
/// has hit the cap.
class ReachOracle final : public MarginalOracle {
 public:
  static constexpr std::int64_t no_cap() { return std::numeric_limits<std::int64_t>::max(); }

  ReachOracle(const DirectedGraph& graph, const ScenarioBatch& batch, DynamicBitset targets,
              std::int64_t cap = no_cap());

  std::unique_ptr<Scratch> make_scratch() const override;
  std::int64_t gain(NodeId v, Scratch& scratch) const override;
  void commit(NodeId v) override;
  std::int64_t value() const override { return total_; }

 private:
  struct State {
    DynamicBitset reached;
    std::int64_t covered = 0;  // |reached ∩ targets|, uncapped
    bool done = false;         // covered >= cap; scenario contributes cap forever
  };

  const DirectedGraph& graph_;
  const ScenarioBatch& batch_;
  DynamicBitset targets_;
  std::int64_t cap_;
  std::vector<State> states_;
  std::int64_t total_ = 0;
};

struct GreedyTrace {
  std::vector<NodeId> chosen;
  std::vector<std::int64_t> gains;  // marginal gain recorded at each pick
  std::int64_t total = 0;           // oracle value of the final set
  std::size_t evaluations = 0;      // gain() calls issued
};

/// Greedy argmax with stale-bound reuse (CELF). Gains of monotone submodular
/// oracles only shrink as the set grows, so a popped entry whose bound is
/// current beats every other true gain; the output therefore matches the
/// naive quadratic greedy exactly, including ties (larger gain first, then
/// smaller node id). Picks min(k, |ground|) nodes even when gains reach zero.
GreedyTrace lazy_greedy(MarginalOracle& oracle, std::span<const NodeId> ground, std::size_t k,
                        int threads = 1);

/// Seed set greedily maximizing expected influenced second-choice supporters
/// of candidate 0 (the promotion surrogate).
GreedyTrace mov_constructive(const ControlProblem& problem, const ScenarioBatch& batch,
                             std::size_t k, int threads = 1);
/// Same for demotion: expected influenced first-choice supporters.
GreedyTrace mov_destructive(const ControlProblem& problem, const ScenarioBatch& batch,
                            std::size_t k, int threads = 1);

/// The caps a threshold search runs through.
struct ThresholdSchedule {
  enum class Kind { exhaustive, sampled };
  Kind kind = Kind::exhaustive;
  std::vector<std::int64_t> caps;  // ascending, distinct

  static ThresholdSchedule exhaustive(std::int64_t lo, std::int64_t hi);
  static ThresholdSchedule sampled(std::int64_t lo, std::int64_t hi, std::size_t count,
                                   std::uint64_t seed);
};

/// Cap range worth searching for `problem`: from the smallest reach that
/// could still witness a win up to the relevant voter-set size (clamped to
/// [1, |relevant|]; (1, 1) when the relevant set is empty).
std::pair<std::int64_t, std::int64_t> cap_range(const ControlProblem& problem);

/// Exhaustive caps when the relevant voter set has at most 200 members,
/// otherwise 150 caps sampled uniformly without replacement.
ThresholdSchedule default_schedule(const ControlProblem& problem, std::uint64_t seed);

struct ThresholdRun {
  std::int64_t cap = 0;
  GreedyTrace trace;
  std::int64_t successes = 0;  // scenarios whose margin meets the required one
};

struct ThresholdSearchResult {
  std::vector<NodeId> seeds;
  std::int64_t successes = 0;
  std::size_t scenario_count = 0;
  std::int64_t chosen_cap = 0;  // 0 when the search short-circuited
  std::vector<ThresholdRun> runs;

  double pov() const {
    return scenario_count == 0 ? 0.0
                               : static_cast<double>(successes) / static_cast<double>(scenario_count);
  }
};

/// Runs one capped greedy per scheduled cap and keeps the seed set with the
/// most winning scenarios on the batch (ties: smaller cap, then
/// lexicographically smaller seed set). Short-circuits to the empty set with
/// probability 1 when candidate 0 already wins.
ThresholdSearchResult enumerate_threshold(const ControlProblem& problem,
                                          const ScenarioBatch& batch, std::size_t k,
                                          const ThresholdSchedule& schedule, int threads = 1);

ThresholdSearchResult pov_constructive(const ControlProblem& problem, const ScenarioBatch& batch,
                                       std::size_t k, const ThresholdSchedule& schedule,
                                       int threads = 1);
ThresholdSearchResult pov_destructive(const ControlProblem& problem, const ScenarioBatch& batch,
                                      std::size_t k, const ThresholdSchedule& schedule,
                                      int threads = 1);

}  // namespace elex

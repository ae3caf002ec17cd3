#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "elex/exact.hpp"
#include "elex/greedy.hpp"
#include "elex/milp.hpp"

namespace elex {

using json = nlohmann::ordered_json;

/// Every voter draws an independent uniform random permutation of the
/// candidates. Deterministic given the seed.
PreferenceProfile generate_profile(NodeId voters, CandidateId candidates, std::uint64_t seed);

/// Candidate 0 takes the top position with probability top_bias, otherwise a
/// uniformly chosen rival does; the remaining candidates fill the other
/// positions in uniformly shuffled order. Sweeping top_bias moves the
/// election from safe to hopeless for candidate 0.
PreferenceProfile generate_biased_profile(NodeId voters, CandidateId candidates, double top_bias,
                                          std::uint64_t seed);

/// G(n, p): every ordered pair (u, v) with u != v gets an edge independently
/// with probability edge_prob; all edges share one activation probability.
DirectedGraph erdos_renyi(NodeId nodes, double edge_prob, double activation_prob,
                          std::uint64_t seed);

/// Growing network: each new node attaches min(out_degree, existing) edges to
/// distinct earlier nodes chosen proportionally to 1 + in-degree.
/// `bidirectional` also inserts every reverse edge.
DirectedGraph preferential_attachment(NodeId nodes, NodeId out_degree, double activation_prob,
                                      std::uint64_t seed, bool bidirectional = false);

/// Approximation-quality study: random instances per cell of the
/// (objective, mode, candidate count, budget) grid, each trial comparing the
/// polynomial algorithm against the exhaustive oracle on one shared batch.
struct StudyConfig {
  NodeId nodes = 100;
  double edge_prob = 0.04;
  double activation_prob = 0.1;
  std::vector<std::size_t> budgets = {3, 5};
  std::vector<CandidateId> candidate_counts = {2, 5};
  std::vector<Mode> modes = {Mode::constructive};
  std::vector<ObjectiveKind> objectives = {ObjectiveKind::mov};
  std::size_t trials = 30;
  std::size_t scenario_count = 8;
  std::uint64_t master_seed = 1009;
  std::uint64_t enumeration_cap = 80'000'000;
  int threads = 1;
};

struct RatioRecord {
  std::size_t trial = 0;
  double approx_value = 0.0;       // algorithm's value on the shared batch
  double exact_value = 0.0;        // oracle optimum on the same batch
  double independent_value = 0.0;  // algorithm's set re-estimated on a fresh batch
  double ratio = 0.0;              // percent of the optimum; 0 when degenerate
  bool degenerate = false;         // oracle optimum was 0, ratio undefined
};

struct RatioCell {
  ObjectiveKind objective = ObjectiveKind::mov;
  Mode mode = Mode::constructive;
  CandidateId candidates = 2;
  std::size_t budget = 0;
  bool infeasible = false;  // enumeration cap would be exceeded; no records
  std::vector<RatioRecord> records;

  // Aggregates over non-degenerate records.
  std::size_t valid_trials = 0;
  std::size_t degenerate_trials = 0;
  double mean_ratio = 0.0;
  double stddev_ratio = 0.0;
  double min_ratio = 0.0;
  double mean_approx = 0.0;
  double mean_exact = 0.0;
  double mean_independent = 0.0;
};

struct RatioStudyResult {
  StudyConfig config;
  std::vector<RatioCell> cells;  // one per grid cell, in config order
};

RatioStudyResult run_ratio_study(const StudyConfig& config);

/// Win-probability sweep: instances whose starting alignment interpolates
/// from bias_lo to bias_hi, recording the required margin next to the
/// threshold-search estimate and the exact optimum on the same batch.
struct SweepConfig {
  NodeId nodes = 40;
  double edge_prob = 0.08;
  double activation_prob = 0.15;
  CandidateId candidates = 2;
  std::size_t budget = 4;
  Mode mode = Mode::constructive;
  std::size_t instances = 60;
  std::size_t scenario_count = 16;
  double bias_lo = 0.65;
  double bias_hi = 0.05;
  std::uint64_t master_seed = 2027;
  std::uint64_t enumeration_cap = 2'000'000;
  int threads = 1;
};

struct SweepPoint {
  std::size_t instance = 0;
  double bias = 0.0;
  std::int64_t required_margin = 0;
  std::int64_t chosen_cap = 0;  // 0 when the threshold search short-circuited
  double approx_pov = 0.0;
  double exact_pov = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepPoint> points;  // sorted by (required_margin, instance)
};

SweepResult run_pov_sweep(const SweepConfig& config);

/// Frozen report schemas; the CSV column sets are documented in
/// docs/formats.md and covered by the determinism tests.
json study_json(const RatioStudyResult& result);
std::string study_csv(const RatioStudyResult& result);
json sweep_json(const SweepResult& result);
std::string sweep_csv(const SweepResult& result);

/// One optimization run as the CLI reports it.
struct RunOptions {
  std::size_t scenario_count = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  bool timing = false;  // when false, wall_time is emitted as null
  std::optional<ThresholdSchedule> schedule;  // pov only; defaulted per instance
  std::uint64_t enumeration_cap = 2'000'000;  // oracle only
};

json run_mov_command(const ControlProblem& problem, const RunOptions& options);
json run_pov_command(const ControlProblem& problem, const RunOptions& options);
json run_oracle_command(const ControlProblem& problem, ObjectiveKind kind,
                        const RunOptions& options);

/// Frozen serialization: {kind, mean, std_error, r, seed_set}.
json estimate_json(const ObjectiveEstimate& estimate);

}  // namespace elex

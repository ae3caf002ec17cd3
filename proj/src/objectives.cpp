#include "elex/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace elex {

std::string_view to_string(ObjectiveKind kind) {
  return kind == ObjectiveKind::mov ? "mov" : "pov";
}

ObjectiveKind objective_from_string(std::string_view name) {
  if (name == "mov") return ObjectiveKind::mov;
  if (name == "pov") return ObjectiveKind::pov;
  throw std::invalid_argument("unknown objective '" + std::string(name) +
                              "' (expected mov or pov)");
}

MarginEvaluator::MarginEvaluator(const PreferenceProfile& profile, Mode mode) : mode_(mode) {
  const NodeId n = profile.voter_count();
  const CandidateId rivals = profile.rival_count();
  // Promotion works on candidate 0's second-choice voters and counts double
  // on those whose first choice is the rival in question; demotion mirrors
  // this with first- and second-choice roles swapped.
  const CandidateId relevant_rank = mode == Mode::constructive ? 2 : 1;
  const CandidateId overlap_rank = mode == Mode::constructive ? 1 : 2;

  relevant_ = DynamicBitset(n);
  for (NodeId v : profile.voter_set(kTargetCandidate, relevant_rank)) relevant_.set(v);

  auto tally = profile.initial_tally();
  std::int64_t best_rival = 0;
  for (CandidateId c = 1; c <= rivals; ++c) best_rival = std::max(best_rival, tally[c]);

  overlap_.reserve(rivals);
  offset_.reserve(rivals);
  for (CandidateId c = 1; c <= rivals; ++c) {
    DynamicBitset mask(n);
    for (NodeId v : profile.voter_set(c, overlap_rank))
      if (relevant_.test(v)) mask.set(v);
    overlap_.push_back(std::move(mask));
    offset_.push_back(mode == Mode::constructive ? best_rival - tally[c]
                                                 : tally[c] - best_rival);
  }
}

std::int64_t MarginEvaluator::margin_from_reached(const DynamicBitset& reached) const {
  std::int64_t f = static_cast<std::int64_t>(reached.count_and(relevant_));
  bool first = true;
  std::int64_t extreme = 0;
  for (std::size_t j = 0; j < overlap_.size(); ++j) {
    std::int64_t term = static_cast<std::int64_t>(reached.count_and(overlap_[j])) + offset_[j];
    if (first) {
      extreme = term;
      first = false;
    } else {
      extreme = mode_ == Mode::constructive ? std::min(extreme, term) : std::max(extreme, term);
    }
  }
  return f + extreme;
}

std::int64_t MarginEvaluator::margin(const DirectedGraph& graph, const Scenario& scenario,
                                     std::span<const NodeId> seeds) const {
  return margin_from_reached(reach_set(graph, scenario, seeds));
}

std::int64_t MarginEvaluator::g_from_reached(const DynamicBitset& reached,
                                             CandidateId rival) const {
  if (rival < 1 || rival > overlap_.size())
    throw std::out_of_range("rival id must name a rival candidate");
  return static_cast<std::int64_t>(reached.count_and(relevant_)) +
         static_cast<std::int64_t>(reached.count_and(overlap_[rival - 1]));
}

const DynamicBitset& MarginEvaluator::rival_overlap(CandidateId rival) const {
  if (rival < 1 || rival > overlap_.size())
    throw std::out_of_range("rival id must name a rival candidate");
  return overlap_[rival - 1];
}

std::int64_t MarginEvaluator::rival_offset(CandidateId rival) const {
  if (rival < 1 || rival > offset_.size())
    throw std::out_of_range("rival id must name a rival candidate");
  return offset_[rival - 1];
}

std::int64_t g_constructive(const ControlProblem& problem, std::span<const NodeId> seeds,
                            const Scenario& scenario, CandidateId rival) {
  MarginEvaluator eval(problem.profile, Mode::constructive);
  return eval.g_from_reached(reach_set(problem.graph, scenario, seeds), rival);
}

std::int64_t g_destructive(const ControlProblem& problem, std::span<const NodeId> seeds,
                           const Scenario& scenario, CandidateId rival) {
  MarginEvaluator eval(problem.profile, Mode::destructive);
  return eval.g_from_reached(reach_set(problem.graph, scenario, seeds), rival);
}

std::int64_t margin_constructive(const ControlProblem& problem, std::span<const NodeId> seeds,
                                 const Scenario& scenario) {
  MarginEvaluator eval(problem.profile, Mode::constructive);
  return eval.margin(problem.graph, scenario, seeds);
}

std::int64_t margin_destructive(const ControlProblem& problem, std::span<const NodeId> seeds,
                                const Scenario& scenario) {
  MarginEvaluator eval(problem.profile, Mode::destructive);
  return eval.margin(problem.graph, scenario, seeds);
}

namespace {

void require_batch(const ScenarioBatch& batch) {
  if (batch.size() == 0) throw std::invalid_argument("scenario batch is empty");
}

// Mean and standard error of the per-scenario values.
void finish_estimate(ObjectiveEstimate& est, std::int64_t total, std::int64_t total_sq,
                     std::size_t r) {
  est.scenario_count = r;
  est.mean = static_cast<double>(total) / static_cast<double>(r);
  if (r >= 2) {
    double sum_sq = static_cast<double>(total_sq);
    double variance = (sum_sq - est.mean * static_cast<double>(total)) / static_cast<double>(r - 1);
    est.std_error = std::sqrt(std::max(0.0, variance) / static_cast<double>(r));
  }
}

}  // namespace

ObjectiveEstimate estimate_mov(const ControlProblem& problem, std::span<const NodeId> seeds,
                               const ScenarioBatch& batch) {
  require_batch(batch);
  MarginEvaluator eval(problem.profile, problem.mode);
  std::int64_t total = 0, total_sq = 0;
  for (const Scenario& y : batch.scenarios) {
    std::int64_t m = eval.margin(problem.graph, y, seeds);
    total += m;
    total_sq += m * m;
  }
  ObjectiveEstimate est;
  est.kind = ObjectiveKind::mov;
  est.mode = problem.mode;
  est.seed_set.assign(seeds.begin(), seeds.end());
  finish_estimate(est, total, total_sq, batch.size());
  return est;
}

ObjectiveEstimate estimate_pov(const ControlProblem& problem, std::span<const NodeId> seeds,
                               const ScenarioBatch& batch) {
  require_batch(batch);
  ObjectiveEstimate est;
  est.kind = ObjectiveKind::pov;
  est.mode = problem.mode;
  est.seed_set.assign(seeds.begin(), seeds.end());
  std::int64_t needed = required_margin(problem);
  if (needed <= 0) {
    est.mean = 1.0;
    est.scenario_count = batch.size();
    return est;
  }
  MarginEvaluator eval(problem.profile, problem.mode);
  std::int64_t wins = 0;
  for (const Scenario& y : batch.scenarios)
    if (eval.margin(problem.graph, y, seeds) >= needed) ++wins;
  finish_estimate(est, wins, wins, batch.size());  // indicator: value == value^2
  return est;
}

}  // namespace elex

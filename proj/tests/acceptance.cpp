// Acceptance gate: eight end-to-end checks over the whole library, one
// pass/fail line each. Exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "elex/cascade.hpp"
#include "elex/election.hpp"
#include "elex/exact.hpp"
#include "elex/greedy.hpp"
#include "elex/harness.hpp"
#include "elex/milp.hpp"
#include "elex/objectives.hpp"
#include "elex/random.hpp"

using namespace elex;

namespace {

constexpr double kGuaranteeSlack = 1e-9;  // floating-point slack on ratio bounds
constexpr double kMilpTolerance = 1e-9;   // value agreement between solver and oracle
constexpr double kTwoCandidateRatio = 1.0 - 1.0 / std::numbers::e;
constexpr double kConstructiveRatio = (1.0 - 1.0 / std::numbers::e) / 3.0;
constexpr double kDestructiveRatio = (1.0 - 1.0 / std::numbers::e) / 2.0;
constexpr double kBicriteriaMulti = (std::numbers::e - 1.0) / (3.0 * std::numbers::e - 1.0);

struct Criterion {
  std::string name;
  std::function<std::string()> run;  // empty string = pass, otherwise failure detail
  double budget_seconds = 0.0;       // 0 = no runtime requirement
};

ControlProblem random_instance(NodeId nodes, CandidateId candidates, Mode mode, std::size_t k,
                               double edge_prob, double activation, std::uint64_t seed) {
  auto graph = erdos_renyi(nodes, edge_prob, activation, derive_seed(seed, 0));
  auto profile = generate_profile(nodes, candidates, derive_seed(seed, 1));
  return ControlProblem(std::move(graph), std::move(profile), mode, static_cast<NodeId>(k));
}

std::vector<NodeId> mask_to_seeds(std::uint32_t mask) {
  std::vector<NodeId> seeds;
  for (NodeId v = 0; mask; ++v, mask >>= 1)
    if (mask & 1) seeds.push_back(v);
  return seeds;
}

// Batch total of the mode's margin for a fixed seed set; the exact integer
// quantity the guarantees are stated over.
std::int64_t margin_total(const ControlProblem& problem, const ScenarioBatch& batch,
                          const std::vector<NodeId>& seeds) {
  MarginEvaluator eval(problem.profile, problem.mode);
  std::int64_t total = 0;
  for (const auto& y : batch.scenarios) total += eval.margin(problem.graph, y, seeds);
  return total;
}

// --- criterion 1: reach totals into either crucial voter set are monotone
// and have diminishing returns, per scenario, exhaustively on small graphs.
std::string check_submodularity() {
  std::size_t checked = 0;
  for (std::uint64_t inst = 0; inst < 50; ++inst) {
    const NodeId n = 3 + static_cast<NodeId>(inst % 6);
    const CandidateId candidates = 2 + static_cast<CandidateId>(inst % 3);
    auto problem = random_instance(n, candidates, Mode::constructive, 1, 0.3, 0.6, 11000 + inst);
    auto batch = sample_batch(problem.graph, 3, derive_seed(11000 + inst, 2));

    for (CandidateId rank : {CandidateId{1}, CandidateId{2}}) {
      DynamicBitset targets(n);
      for (NodeId v : problem.profile.voter_set(kTargetCandidate, rank)) targets.set(v);

      for (const auto& y : batch.scenarios) {
        const std::uint32_t masks = 1u << n;
        std::vector<std::int64_t> value(masks);
        for (std::uint32_t mask = 0; mask < masks; ++mask)
          value[mask] = reach_count(problem.graph, y, mask_to_seeds(mask), targets);

        for (std::uint32_t b = 0; b < masks; ++b) {
          for (NodeId x = 0; x < n; ++x) {
            if (b & (1u << x)) continue;
            const std::uint32_t bx = b | (1u << x);
            if (value[bx] < value[b])
              return "monotonicity violated on instance " + std::to_string(inst);
            const std::int64_t later = value[bx] - value[b];
            // Every subset of b must gain at least as much from x.
            for (std::uint32_t a = b;; a = (a - 1) & b) {
              if (value[a | (1u << x)] - value[a] < later)
                return "diminishing returns violated on instance " + std::to_string(inst);
              ++checked;
              if (a == 0) break;
            }
          }
        }
      }
    }
  }
  if (checked < 500000) return "only " + std::to_string(checked) + " comparisons ran";
  return "";
}

// --- criterion 2: greedy margin totals stay above the proven fraction of
// the enumerated optimum on every instance.
std::string check_greedy_guarantees() {
  for (std::uint64_t inst = 0; inst < 100; ++inst) {
    const NodeId n = 6 + static_cast<NodeId>(inst % 5);
    const std::size_t k = 1 + inst % 3;
    const std::size_t r = 2 + inst % 7;

    CandidateId candidates;
    Mode mode;
    double ratio;
    if (inst % 2 == 0) {
      candidates = 2;
      mode = Mode::constructive;
      ratio = kTwoCandidateRatio;
    } else if (inst % 4 == 1) {
      candidates = 3 + static_cast<CandidateId>(inst % 3);
      mode = Mode::constructive;
      ratio = kConstructiveRatio;
    } else {
      candidates = 3 + static_cast<CandidateId>(inst % 3);
      mode = Mode::destructive;
      ratio = kDestructiveRatio;
    }

    auto problem = random_instance(n, candidates, mode, k, 0.25, 0.5, 21000 + inst);
    auto batch = sample_batch(problem.graph, r, derive_seed(21000 + inst, 2));

    auto trace = mode == Mode::constructive ? mov_constructive(problem, batch, k)
                                            : mov_destructive(problem, batch, k);
    const std::int64_t greedy_total = margin_total(problem, batch, trace.chosen);
    const std::int64_t opt_total = brute_force(problem, batch, k, ObjectiveKind::mov).best_total;

    if (static_cast<double>(greedy_total) <
        ratio * static_cast<double>(opt_total) - kGuaranteeSlack)
      return "instance " + std::to_string(inst) + ": greedy " + std::to_string(greedy_total) +
             " below " + std::to_string(ratio) + " * " + std::to_string(opt_total);
  }
  return "";
}

// --- criterion 3: for every cap the threshold search tried, its win
// probability beats the bicriteria bound computed from the enumerated
// optimum of the relaxed threshold.
std::string check_bicriteria_bounds() {
  std::size_t bounds_checked = 0;
  for (std::uint64_t inst = 0; inst < 60; ++inst) {
    const NodeId n = 6 + static_cast<NodeId>(inst % 5);
    const std::size_t k = 1 + inst % 3;
    const std::size_t r = 2 + inst % 7;
    const bool two_candidates = inst % 2 == 0;
    const CandidateId candidates = two_candidates ? 2 : 3 + static_cast<CandidateId>(inst % 3);
    Mode mode = inst % 4 < 2 ? Mode::constructive : Mode::destructive;
    if (two_candidates && mode == Mode::destructive) mode = Mode::constructive;

    auto problem = random_instance(n, candidates, mode, k, 0.25, 0.5, 31000 + inst);
    auto batch = sample_batch(problem.graph, r, derive_seed(31000 + inst, 2));

    auto [lo, hi] = cap_range(problem);
    auto search = enumerate_threshold(problem, batch, k,
                                      ThresholdSchedule::exhaustive(lo, hi));
    const double pov = search.pov();

    // The two-candidate guarantee counts influenced voters; the multicandidate
    // ones count margin points. Caps are voter counts either way, and one
    // influenced voter is two margin points with a single rival.
    const std::int64_t delta =
        two_candidates ? threshold(problem) : required_margin(problem);
    if (delta <= 0) continue;
    const double constant = two_candidates ? kTwoCandidateRatio : kBicriteriaMulti;

    for (const ThresholdRun& run : search.runs) {
      if (run.cap <= delta) continue;  // alpha >= 1: the guarantee says nothing
      const double alpha = static_cast<double>(delta) / static_cast<double>(run.cap);

      OracleOptions options;
      options.pov_margin_override = two_candidates ? 2 * run.cap : run.cap;
      const double relaxed_opt =
          brute_force(problem, batch, k, ObjectiveKind::pov, options).best_value;

      const double bound = (constant * relaxed_opt - alpha) / (1.0 - alpha);
      ++bounds_checked;
      if (pov < bound - kGuaranteeSlack) {
        std::ostringstream msg;
        msg << "instance " << inst << ": pov " << pov << " below bound " << bound
            << " at cap " << run.cap;
        return msg.str();
      }
    }
  }
  if (bounds_checked < 50) return "only " + std::to_string(bounds_checked) + " bounds checked";
  return "";
}

// --- criterion 4: the enumerative solution of the built model matches the
// direct oracle, and the model's margin rows reproduce the margins exactly.
std::string check_milp_equivalence() {
  std::uint64_t inst = 0;
  for (ObjectiveKind kind : {ObjectiveKind::mov, ObjectiveKind::pov}) {
    for (Mode mode : {Mode::constructive, Mode::destructive}) {
      for (std::uint64_t rep = 0; rep < 25; ++rep, ++inst) {
        const NodeId n = 4 + static_cast<NodeId>(rep % 5);
        const std::size_t k = 1 + rep % 2;
        const std::size_t r = 1 + rep % 4;
        const CandidateId candidates = 2 + static_cast<CandidateId>(rep % 3);

        auto problem = random_instance(n, candidates, mode, k, 0.3, 0.5, 41000 + inst);
        auto batch = sample_batch(problem.graph, r, derive_seed(41000 + inst, 2));

        auto model = build_milp(problem, batch, k, kind);
        auto solved = solve_enumerative(model);
        auto oracle = brute_force(problem, batch, k, kind);
        if (std::abs(solved.best_value - oracle.best_value) > kMilpTolerance)
          return "instance " + std::to_string(inst) + ": solver " +
                 std::to_string(solved.best_value) + " vs oracle " +
                 std::to_string(oracle.best_value);
        if (solved.best_set != oracle.best_set)
          return "instance " + std::to_string(inst) + ": argmax sets differ";

        // Derived margin variables must equal the direct margins for every
        // budget-feasible assignment, not just the winner.
        MarginEvaluator eval(problem.profile, problem.mode);
        std::string mismatch;
        std::vector<NodeId> seeds;
        std::function<bool(NodeId)> walk = [&](NodeId next) {
          auto margins = model_margins(model, seeds);
          for (std::size_t i = 0; i < batch.size(); ++i)
            if (margins[i] != eval.margin(problem.graph, batch.scenarios[i], seeds)) {
              mismatch = "derived margin differs in scenario " + std::to_string(i);
              return false;
            }
          if (seeds.size() == k) return true;
          for (NodeId v = next; v < n; ++v) {
            seeds.push_back(v);
            if (!walk(v + 1)) return false;
            seeds.pop_back();
          }
          return true;
        };
        if (!walk(0)) return "instance " + std::to_string(inst) + ": " + mismatch;
      }
    }
  }
  return "";
}

// --- criterion 5: with one rival the margin is exactly twice the number of
// influenced second-choice supporters.
std::string check_two_candidate_collapse() {
  std::size_t draws = 0;
  Rng rng(52025);
  for (std::uint64_t inst = 0; inst < 50; ++inst) {
    const NodeId n = 10 + static_cast<NodeId>(inst % 21);
    auto problem = random_instance(n, 2, Mode::constructive, 1, 0.2, 0.5, 51000 + inst);
    auto batch = sample_batch(problem.graph, 4, derive_seed(51000 + inst, 2));

    DynamicBitset relevant(n);
    for (NodeId v : problem.profile.voter_set(kTargetCandidate, 2)) relevant.set(v);

    for (std::uint64_t rep = 0; rep < 200; ++rep) {
      std::vector<NodeId> seeds;
      for (NodeId v = 0; v < n; ++v)
        if (canonical_double(rng) < 0.3) seeds.push_back(v);
      const auto& y = batch.scenarios[bounded_uint64(rng, batch.size())];
      ++draws;
      if (margin_constructive(problem, seeds, y) !=
          2 * reach_count(problem.graph, y, seeds, relevant))
        return "collapse identity failed on instance " + std::to_string(inst);
    }
  }
  if (draws < 10000) return "only " + std::to_string(draws) + " draws";
  return "";
}

// --- criterion 6: at benchmark scale the greedy margin stays close to the
// enumerated optimum, per (candidates, budget) cell.
std::string check_ratio_study() {
  StudyConfig config;  // defaults pin n=100, activation 0.1, k in {3,5}, 2 and 5 candidates
  auto result = run_ratio_study(config);
  const std::size_t expected_cells = config.budgets.size() * config.candidate_counts.size();
  if (result.cells.size() != expected_cells)
    return "expected " + std::to_string(expected_cells) + " cells, got " +
           std::to_string(result.cells.size());

  std::ostringstream msg;
  for (const auto& cell : result.cells) {
    if (cell.infeasible)
      return "cell with " + std::to_string(cell.candidates) + " candidates, budget " +
             std::to_string(cell.budget) + " skipped as infeasible";
    if (cell.valid_trials == 0)
      return "cell with " + std::to_string(cell.candidates) + " candidates, budget " +
             std::to_string(cell.budget) + " has no valid trials";
    const double floor = cell.candidates == 2 ? 95.0 : 70.0;
    if (cell.mean_ratio < floor) {
      msg << "cell candidates=" << static_cast<int>(cell.candidates)
          << " budget=" << cell.budget << ": mean ratio " << cell.mean_ratio << " below "
          << floor;
      return msg.str();
    }
  }
  return "";
}

// --- criterion 7: sweeping the starting alignment from safe to hopeless
// drives both win probabilities from one toward zero.
std::string check_pov_sweep() {
  SweepConfig config;  // defaults: 60 instances from bias 0.65 down to 0.05
  auto result = run_pov_sweep(config);
  const std::size_t decile = result.points.size() / 10;
  if (decile == 0) return "sweep too small to bucket";

  double small_exact = 0, small_approx = 0, large_exact = 0, large_approx = 0;
  for (std::size_t i = 0; i < decile; ++i) {
    small_exact += result.points[i].exact_pov;
    small_approx += result.points[i].approx_pov;
    const auto& tail = result.points[result.points.size() - 1 - i];
    large_exact += tail.exact_pov;
    large_approx += tail.approx_pov;
  }
  small_exact /= decile;
  small_approx /= decile;
  large_exact /= decile;
  large_approx /= decile;

  std::ostringstream msg;
  msg.precision(3);
  if (small_exact < 0.9 || small_approx < 0.9) {
    msg << "smallest-margin decile too weak: exact " << small_exact << ", approx "
        << small_approx;
    return msg.str();
  }
  if (large_exact > 0.1 || large_approx > 0.1) {
    msg << "largest-margin decile too strong: exact " << large_exact << ", approx "
        << large_approx;
    return msg.str();
  }
  return "";
}

// --- criterion 8: identical seeds give identical bytes, no matter how many
// workers run.
std::string check_determinism() {
  StudyConfig study;
  study.nodes = 14;
  study.budgets = {2};
  study.candidate_counts = {2, 3};
  study.trials = 3;
  study.scenario_count = 5;
  study.master_seed = 606;

  auto study_a = run_ratio_study(study);
  auto study_b = run_ratio_study(study);
  study.threads = 2;
  auto study_c = run_ratio_study(study);
  if (study_csv(study_a) != study_csv(study_b)) return "study CSV differs between reruns";
  if (study_json(study_a).dump(2) != study_json(study_b).dump(2))
    return "study JSON differs between reruns";
  if (study_csv(study_a) != study_csv(study_c)) return "study CSV depends on the worker count";
  if (study_json(study_a).dump(2) != study_json(study_c).dump(2))
    return "study JSON depends on the worker count";

  SweepConfig sweep;
  sweep.nodes = 12;
  sweep.instances = 6;
  sweep.scenario_count = 5;
  sweep.budget = 2;
  auto sweep_a = run_pov_sweep(sweep);
  auto sweep_b = run_pov_sweep(sweep);
  sweep.threads = 2;
  auto sweep_c = run_pov_sweep(sweep);
  if (sweep_csv(sweep_a) != sweep_csv(sweep_b)) return "sweep CSV differs between reruns";
  if (sweep_json(sweep_a).dump(2) != sweep_json(sweep_b).dump(2))
    return "sweep JSON differs between reruns";
  if (sweep_csv(sweep_a) != sweep_csv(sweep_c)) return "sweep CSV depends on the worker count";
  if (sweep_json(sweep_a).dump(2) != sweep_json(sweep_c).dump(2))
    return "sweep JSON depends on the worker count";

  auto problem = random_instance(25, 3, Mode::constructive, 3, 0.12, 0.3, 60606);
  RunOptions options;
  options.scenario_count = 40;
  options.seed = 17;
  auto mov_a = run_mov_command(problem, options).dump(2);
  auto pov_a = run_pov_command(problem, options).dump(2);
  auto oracle_a = run_oracle_command(problem, ObjectiveKind::mov, options).dump(2);
  options.threads = 2;
  if (run_mov_command(problem, options).dump(2) != mov_a)
    return "margin run depends on the worker count";
  if (run_pov_command(problem, options).dump(2) != pov_a)
    return "win-probability run depends on the worker count";
  if (run_oracle_command(problem, ObjectiveKind::mov, options).dump(2) != oracle_a)
    return "oracle run depends on the worker count";
  return "";
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"reach totals are monotone submodular per scenario", check_submodularity, 60.0},
      {"greedy stays above its guarantee against the oracle", check_greedy_guarantees, 300.0},
      {"threshold search beats every bicriteria bound", check_bicriteria_bounds, 0.0},
      {"enumerative model solutions match the oracle", check_milp_equivalence, 0.0},
      {"one-rival margins equal twice the influenced count", check_two_candidate_collapse, 0.0},
      {"benchmark-scale greedy ratios stay high", check_ratio_study, 1800.0},
      {"win probability falls from one to zero across the sweep", check_pov_sweep, 0.0},
      {"reruns and worker counts reproduce identical bytes", check_determinism, 0.0},
  };

  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = criteria[i].run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (detail.empty() && criteria[i].budget_seconds > 0 &&
        seconds > criteria[i].budget_seconds) {
      std::ostringstream msg;
      msg.precision(1);
      msg << std::fixed << "took " << seconds << "s, budget " << criteria[i].budget_seconds
          << "s";
      detail = msg.str();
    }
    const bool pass = detail.empty();
    all_pass = all_pass && pass;
    std::printf("criterion %zu: %s ... %s (%.1fs)%s%s\n", i + 1, criteria[i].name.c_str(),
                pass ? "PASS" : "FAIL", seconds, pass ? "" : " - ", detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}

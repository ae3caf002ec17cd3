#include "elex/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "elex/cascade.hpp"
#include "elex/format.hpp"
#include "elex/objectives.hpp"
#include "elex/random.hpp"

namespace elex {

PreferenceProfile generate_profile(NodeId voters, CandidateId candidates, std::uint64_t seed) {
  if (candidates < 2) throw std::invalid_argument("generate_profile: need at least 2 candidates");
  Rng rng(seed);
  std::vector<std::vector<CandidateId>> rankings(voters);
  for (NodeId v = 0; v < voters; ++v) {
    std::vector<CandidateId> ranking(candidates);
    std::iota(ranking.begin(), ranking.end(), CandidateId{0});
    shuffle_values(ranking, rng);
    rankings[v] = std::move(ranking);
  }
  return PreferenceProfile(std::move(rankings), candidates);
}

PreferenceProfile generate_biased_profile(NodeId voters, CandidateId candidates, double top_bias,
                                          std::uint64_t seed) {
  if (candidates < 2) {
    throw std::invalid_argument("generate_biased_profile: need at least 2 candidates");
  }
  if (!(top_bias >= 0.0 && top_bias <= 1.0)) {
    throw std::invalid_argument("generate_biased_profile: top_bias must be in [0, 1]");
  }
  Rng rng(seed);
  std::vector<std::vector<CandidateId>> rankings(voters);
  for (NodeId v = 0; v < voters; ++v) {
    CandidateId top = 0;
    if (canonical_double(rng) >= top_bias) {
      top = 1 + static_cast<CandidateId>(bounded_uint64(rng, candidates - 1));
    }
    std::vector<CandidateId> rest;
    rest.reserve(candidates - 1);
    for (CandidateId c = 0; c < candidates; ++c) {
      if (c != top) rest.push_back(c);
    }
    shuffle_values(rest, rng);
    std::vector<CandidateId> ranking;
    ranking.reserve(candidates);
    ranking.push_back(top);
    ranking.insert(ranking.end(), rest.begin(), rest.end());
    rankings[v] = std::move(ranking);
  }
  return PreferenceProfile(std::move(rankings), candidates);
}

DirectedGraph erdos_renyi(NodeId nodes, double edge_prob, double activation_prob,
                          std::uint64_t seed) {
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
    throw std::invalid_argument("erdos_renyi: edge_prob must be in [0, 1]");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < nodes; ++u) {
    for (NodeId v = 0; v < nodes; ++v) {
      if (u == v) continue;
      if (canonical_double(rng) < edge_prob) edges.push_back({u, v, activation_prob});
    }
  }
  return DirectedGraph(nodes, std::move(edges));
}

DirectedGraph preferential_attachment(NodeId nodes, NodeId out_degree, double activation_prob,
                                      std::uint64_t seed, bool bidirectional) {
  if (out_degree == 0) throw std::invalid_argument("preferential_attachment: out_degree is zero");
  Rng rng(seed);
  std::vector<Edge> edges;
  std::vector<NodeId> pool;  // every node once, plus once per in-edge
  if (nodes > 0) pool.push_back(0);
  for (NodeId v = 1; v < nodes; ++v) {
    const NodeId want = std::min<NodeId>(out_degree, v);
    std::vector<NodeId> picked;
    while (picked.size() < want) {
      const NodeId t = pool[bounded_uint64(rng, pool.size())];
      if (std::find(picked.begin(), picked.end(), t) != picked.end()) continue;
      picked.push_back(t);
    }
    for (NodeId t : picked) {
      edges.push_back({v, t, activation_prob});
      if (bidirectional) edges.push_back({t, v, activation_prob});
      pool.push_back(t);
    }
    pool.push_back(v);
  }
  return DirectedGraph(nodes, std::move(edges));
}

namespace {

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
};

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate out;
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
  out.min = *std::min_element(values.begin(), values.end());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

void validate_common(NodeId nodes, double edge_prob, double activation_prob,
                     std::size_t scenario_count, std::size_t trials) {
  if (nodes == 0) throw std::invalid_argument("study: node count is zero");
  if (trials == 0) throw std::invalid_argument("study: need at least one trial");
  if (scenario_count == 0) throw std::invalid_argument("study: need at least one scenario");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0) ||
      !(activation_prob >= 0.0 && activation_prob <= 1.0)) {
    throw std::invalid_argument("study: probabilities must be in [0, 1]");
  }
}

}  // namespace

RatioStudyResult run_ratio_study(const StudyConfig& config) {
  validate_common(config.nodes, config.edge_prob, config.activation_prob, config.scenario_count,
                  config.trials);
  for (std::size_t k : config.budgets) {
    if (k == 0 || k > config.nodes) throw std::invalid_argument("study: budget out of range");
  }
  for (CandidateId c : config.candidate_counts) {
    if (c < 2) throw std::invalid_argument("study: need at least 2 candidates");
  }

  RatioStudyResult out;
  out.config = config;
  OracleOptions oracle_options;
  oracle_options.enumeration_cap = config.enumeration_cap;
  oracle_options.threads = config.threads;

  std::size_t cell_index = 0;
  for (ObjectiveKind objective : config.objectives) {
    for (Mode mode : config.modes) {
      for (CandidateId candidates : config.candidate_counts) {
        for (std::size_t budget : config.budgets) {
          RatioCell cell;
          cell.objective = objective;
          cell.mode = mode;
          cell.candidates = candidates;
          cell.budget = budget;
          cell.infeasible = subset_count(config.nodes, budget) > config.enumeration_cap;
          if (!cell.infeasible) {
            for (std::size_t t = 0; t < config.trials; ++t) {
              const std::uint64_t instance_seed =
                  derive_seed(config.master_seed, cell_index * config.trials + t);
              DirectedGraph graph = erdos_renyi(config.nodes, config.edge_prob,
                                                config.activation_prob, derive_seed(instance_seed, 0));
              PreferenceProfile profile =
                  generate_profile(config.nodes, candidates, derive_seed(instance_seed, 1));
              ControlProblem problem(std::move(graph), std::move(profile), mode,
                                     static_cast<NodeId>(budget));
              const ScenarioBatch batch = sample_batch(problem.graph, config.scenario_count,
                                                       derive_seed(instance_seed, 2));
              const ScenarioBatch fresh = sample_batch(problem.graph, config.scenario_count,
                                                       derive_seed(instance_seed, 3));

              RatioRecord record;
              record.trial = t;
              OracleResult exact;
              if (objective == ObjectiveKind::mov) {
                const GreedyTrace trace = mode == Mode::constructive
                                              ? mov_constructive(problem, batch, budget,
                                                                 config.threads)
                                              : mov_destructive(problem, batch, budget,
                                                                config.threads);
                record.approx_value = estimate_mov(problem, trace.chosen, batch).mean;
                record.independent_value = estimate_mov(problem, trace.chosen, fresh).mean;
                exact = brute_force(problem, batch, budget, ObjectiveKind::mov, oracle_options);
              } else {
                const ThresholdSchedule schedule =
                    default_schedule(problem, derive_seed(instance_seed, 4));
                const ThresholdSearchResult search =
                    enumerate_threshold(problem, batch, budget, schedule, config.threads);
                record.approx_value = search.pov();
                record.independent_value = estimate_pov(problem, search.seeds, fresh).mean;
                exact = brute_force(problem, batch, budget, ObjectiveKind::pov, oracle_options);
              }
              record.exact_value = exact.best_value;
              if (exact.best_total == 0) {
                record.degenerate = true;
              } else {
                record.ratio = 100.0 * record.approx_value / record.exact_value;
              }
              cell.records.push_back(record);
            }
            std::vector<double> ratios;
            std::vector<double> approx;
            std::vector<double> exact_values;
            std::vector<double> independent;
            for (const RatioRecord& record : cell.records) {
              if (record.degenerate) continue;
              ratios.push_back(record.ratio);
              approx.push_back(record.approx_value);
              exact_values.push_back(record.exact_value);
              independent.push_back(record.independent_value);
            }
            cell.valid_trials = ratios.size();
            cell.degenerate_trials = cell.records.size() - ratios.size();
            const Aggregate ratio_stats = aggregate(ratios);
            cell.mean_ratio = ratio_stats.mean;
            cell.stddev_ratio = ratio_stats.stddev;
            cell.min_ratio = ratio_stats.min;
            cell.mean_approx = aggregate(approx).mean;
            cell.mean_exact = aggregate(exact_values).mean;
            cell.mean_independent = aggregate(independent).mean;
          }
          out.cells.push_back(std::move(cell));
          ++cell_index;
        }
      }
    }
  }
  return out;
}

SweepResult run_pov_sweep(const SweepConfig& config) {
  validate_common(config.nodes, config.edge_prob, config.activation_prob, config.scenario_count,
                  config.instances);
  if (config.budget == 0 || config.budget > config.nodes) {
    throw std::invalid_argument("sweep: budget out of range");
  }
  if (config.candidates < 2) throw std::invalid_argument("sweep: need at least 2 candidates");
  if (!(config.bias_lo >= 0.0 && config.bias_lo <= 1.0) ||
      !(config.bias_hi >= 0.0 && config.bias_hi <= 1.0)) {
    throw std::invalid_argument("sweep: biases must be in [0, 1]");
  }

  SweepResult out;
  out.config = config;
  OracleOptions oracle_options;
  oracle_options.enumeration_cap = config.enumeration_cap;
  oracle_options.threads = config.threads;

  for (std::size_t i = 0; i < config.instances; ++i) {
    const double frac = config.instances == 1
                            ? 0.0
                            : static_cast<double>(i) / static_cast<double>(config.instances - 1);
    const double bias = config.bias_lo + (config.bias_hi - config.bias_lo) * frac;
    const std::uint64_t instance_seed = derive_seed(config.master_seed, i);
    DirectedGraph graph = erdos_renyi(config.nodes, config.edge_prob, config.activation_prob,
                                      derive_seed(instance_seed, 0));
    PreferenceProfile profile = generate_biased_profile(config.nodes, config.candidates, bias,
                                                        derive_seed(instance_seed, 1));
    ControlProblem problem(std::move(graph), std::move(profile), config.mode,
                           static_cast<NodeId>(config.budget));
    const ScenarioBatch batch =
        sample_batch(problem.graph, config.scenario_count, derive_seed(instance_seed, 2));
    const ThresholdSchedule schedule = default_schedule(problem, derive_seed(instance_seed, 4));
    const ThresholdSearchResult search =
        enumerate_threshold(problem, batch, config.budget, schedule, config.threads);
    const OracleResult exact =
        brute_force(problem, batch, config.budget, ObjectiveKind::pov, oracle_options);

    SweepPoint point;
    point.instance = i;
    point.bias = bias;
    point.required_margin = required_margin(problem);
    point.chosen_cap = search.chosen_cap;
    point.approx_pov = search.pov();
    point.exact_pov = exact.best_value;
    out.points.push_back(point);
  }
  std::sort(out.points.begin(), out.points.end(), [](const SweepPoint& a, const SweepPoint& b) {
    if (a.required_margin != b.required_margin) return a.required_margin < b.required_margin;
    return a.instance < b.instance;
  });
  return out;
}

namespace {

json mode_list(const std::vector<Mode>& modes) {
  json out = json::array();
  for (Mode mode : modes) out.push_back(std::string(to_string(mode)));
  return out;
}

json objective_list(const std::vector<ObjectiveKind>& kinds) {
  json out = json::array();
  for (ObjectiveKind kind : kinds) out.push_back(std::string(to_string(kind)));
  return out;
}

std::string csv_double(double value) { return format_double(value); }

}  // namespace

json study_json(const RatioStudyResult& result) {
  const StudyConfig& config = result.config;
  json out;
  out["study"] = "ratio";
  out["config"] = {{"nodes", config.nodes},
                   {"edge_prob", config.edge_prob},
                   {"activation_prob", config.activation_prob},
                   {"budgets", config.budgets},
                   {"candidate_counts", config.candidate_counts},
                   {"modes", mode_list(config.modes)},
                   {"objectives", objective_list(config.objectives)},
                   {"trials", config.trials},
                   {"scenarios", config.scenario_count},
                   {"master_seed", config.master_seed},
                   {"enumeration_cap", config.enumeration_cap}};
  out["cells"] = json::array();
  for (const RatioCell& cell : result.cells) {
    json c;
    c["objective"] = std::string(to_string(cell.objective));
    c["mode"] = std::string(to_string(cell.mode));
    c["candidates"] = cell.candidates;
    c["budget"] = cell.budget;
    c["status"] = cell.infeasible ? "infeasible" : "ok";
    c["trials"] = cell.records.size();
    c["valid_trials"] = cell.valid_trials;
    c["degenerate_trials"] = cell.degenerate_trials;
    if (!cell.infeasible) {
      c["mean_ratio"] = cell.mean_ratio;
      c["stddev_ratio"] = cell.stddev_ratio;
      c["min_ratio"] = cell.min_ratio;
      c["mean_approx"] = cell.mean_approx;
      c["mean_exact"] = cell.mean_exact;
      c["mean_independent"] = cell.mean_independent;
      c["records"] = json::array();
      for (const RatioRecord& record : cell.records) {
        c["records"].push_back({{"trial", record.trial},
                                {"approx", record.approx_value},
                                {"exact", record.exact_value},
                                {"independent", record.independent_value},
                                {"ratio", record.ratio},
                                {"degenerate", record.degenerate}});
      }
    }
    out["cells"].push_back(std::move(c));
  }
  return out;
}

std::string study_csv(const RatioStudyResult& result) {
  std::string out =
      "objective,mode,candidates,budget,trials,valid_trials,degenerate_trials,status,"
      "mean_ratio,stddev_ratio,min_ratio,mean_approx,mean_exact,mean_independent\n";
  for (const RatioCell& cell : result.cells) {
    out += std::string(to_string(cell.objective));
    out += ',';
    out += std::string(to_string(cell.mode));
    out += ',';
    out += std::to_string(cell.candidates);
    out += ',';
    out += std::to_string(cell.budget);
    out += ',';
    out += std::to_string(cell.records.size());
    out += ',';
    out += std::to_string(cell.valid_trials);
    out += ',';
    out += std::to_string(cell.degenerate_trials);
    out += ',';
    out += cell.infeasible ? "infeasible" : "ok";
    if (cell.infeasible) {
      out += ",,,,,,\n";
      continue;
    }
    out += ',';
    out += csv_double(cell.mean_ratio);
    out += ',';
    out += csv_double(cell.stddev_ratio);
    out += ',';
    out += csv_double(cell.min_ratio);
    out += ',';
    out += csv_double(cell.mean_approx);
    out += ',';
    out += csv_double(cell.mean_exact);
    out += ',';
    out += csv_double(cell.mean_independent);
    out += '\n';
  }
  return out;
}

json sweep_json(const SweepResult& result) {
  const SweepConfig& config = result.config;
  json out;
  out["study"] = "pov_sweep";
  out["config"] = {{"nodes", config.nodes},
                   {"edge_prob", config.edge_prob},
                   {"activation_prob", config.activation_prob},
                   {"candidates", config.candidates},
                   {"budget", config.budget},
                   {"mode", std::string(to_string(config.mode))},
                   {"instances", config.instances},
                   {"scenarios", config.scenario_count},
                   {"bias_lo", config.bias_lo},
                   {"bias_hi", config.bias_hi},
                   {"master_seed", config.master_seed},
                   {"enumeration_cap", config.enumeration_cap}};
  out["points"] = json::array();
  for (const SweepPoint& point : result.points) {
    out["points"].push_back({{"instance", point.instance},
                             {"bias", point.bias},
                             {"required_margin", point.required_margin},
                             {"chosen_cap", point.chosen_cap},
                             {"approx_pov", point.approx_pov},
                             {"exact_pov", point.exact_pov}});
  }
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "instance,bias,required_margin,chosen_cap,approx_pov,exact_pov\n";
  for (const SweepPoint& point : result.points) {
    out += std::to_string(point.instance);
    out += ',';
    out += csv_double(point.bias);
    out += ',';
    out += std::to_string(point.required_margin);
    out += ',';
    out += std::to_string(point.chosen_cap);
    out += ',';
    out += csv_double(point.approx_pov);
    out += ',';
    out += csv_double(point.exact_pov);
    out += '\n';
  }
  return out;
}

namespace {

/// Fresh evaluation batches use a master seed far away from the optimization
/// batch's scenario streams.
std::uint64_t fresh_master(std::uint64_t seed) {
  return derive_seed(seed, std::numeric_limits<std::uint64_t>::max());
}

json problem_header(const ControlProblem& problem, const RunOptions& options) {
  json out;
  out["mode"] = std::string(to_string(problem.mode));
  out["nodes"] = problem.graph.node_count();
  out["edges"] = problem.graph.edge_count();
  out["voters"] = problem.profile.voter_count();
  out["candidates"] = problem.profile.candidate_count();
  out["k"] = problem.budget;
  out["scenarios"] = options.scenario_count;
  out["seed"] = options.seed;
  out["required_margin"] = required_margin(problem);
  out["threshold"] = threshold(problem);
  return out;
}

json seed_array(const std::vector<NodeId>& seeds) {
  json out = json::array();
  for (NodeId v : seeds) out.push_back(v);
  return out;
}

class WallClock {
 public:
  explicit WallClock(bool enabled) : enabled_(enabled) {}

  json elapsed() const {
    if (!enabled_) return json(nullptr);
    const auto delta = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double>(delta).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

json run_mov_command(const ControlProblem& problem, const RunOptions& options) {
  const WallClock clock(options.timing);
  const ScenarioBatch batch =
      sample_batch(problem.graph, options.scenario_count, options.seed);
  const GreedyTrace trace =
      problem.mode == Mode::constructive
          ? mov_constructive(problem, batch, problem.budget, options.threads)
          : mov_destructive(problem, batch, problem.budget, options.threads);
  const ObjectiveEstimate shared = estimate_mov(problem, trace.chosen, batch);
  const std::uint64_t fresh_seed = fresh_master(options.seed);
  const ScenarioBatch fresh =
      sample_batch(problem.graph, options.scenario_count, fresh_seed);
  const ObjectiveEstimate fresh_eval = estimate_mov(problem, trace.chosen, fresh);

  json out;
  out["command"] = "mov";
  out["algorithm"] = "lazy_greedy";
  out["objective"] = "mov";
  out.update(problem_header(problem, options));
  out["seeds"] = seed_array(trace.chosen);
  out["marginal_gains"] = trace.gains;
  out["surrogate_value"] = trace.total;
  out["oracle_evaluations"] = trace.evaluations;
  out["shared_estimate"] = estimate_json(shared);
  out["mov_estimate"] = estimate_json(fresh_eval);
  out["fresh_seed"] = fresh_seed;
  out["schedule_info"] = json(nullptr);
  out["wall_time"] = clock.elapsed();
  return out;
}

json run_pov_command(const ControlProblem& problem, const RunOptions& options) {
  const WallClock clock(options.timing);
  const ScenarioBatch batch =
      sample_batch(problem.graph, options.scenario_count, options.seed);
  const ThresholdSchedule schedule =
      options.schedule ? *options.schedule
                       : default_schedule(problem, derive_seed(options.seed, 151));
  const ThresholdSearchResult search =
      enumerate_threshold(problem, batch, problem.budget, schedule, options.threads);
  const std::uint64_t fresh_seed = fresh_master(options.seed);
  const ScenarioBatch fresh =
      sample_batch(problem.graph, options.scenario_count, fresh_seed);
  const ObjectiveEstimate fresh_eval = estimate_pov(problem, search.seeds, fresh);

  std::int64_t surrogate_value = 0;
  json runs = json::array();
  for (const ThresholdRun& run : search.runs) {
    if (run.cap == search.chosen_cap && run.trace.chosen == search.seeds) {
      surrogate_value = run.trace.total;
    }
    runs.push_back({{"cap", run.cap},
                    {"surrogate_value", run.trace.total},
                    {"successes", run.successes}});
  }

  json out;
  out["command"] = "pov";
  out["algorithm"] = "threshold_enumeration";
  out["objective"] = "pov";
  out.update(problem_header(problem, options));
  out["schedule_info"] = {{"kind", schedule.kind == ThresholdSchedule::Kind::exhaustive
                                       ? "exhaustive"
                                       : "sampled"},
                          {"count", schedule.caps.size()},
                          {"caps", schedule.caps},
                          {"chosen_cap", search.chosen_cap}};
  out["successes"] = search.successes;
  out["pov"] = search.pov();
  out["seeds"] = seed_array(search.seeds);
  out["surrogate_value"] = surrogate_value;
  out["runs"] = std::move(runs);
  out["pov_estimate"] = estimate_json(fresh_eval);
  out["fresh_seed"] = fresh_seed;
  out["wall_time"] = clock.elapsed();
  return out;
}

json run_oracle_command(const ControlProblem& problem, ObjectiveKind kind,
                        const RunOptions& options) {
  const WallClock clock(options.timing);
  const ScenarioBatch batch =
      sample_batch(problem.graph, options.scenario_count, options.seed);
  OracleOptions oracle_options;
  oracle_options.enumeration_cap = options.enumeration_cap;
  oracle_options.threads = options.threads;
  const OracleResult result = brute_force(problem, batch, problem.budget, kind, oracle_options);

  json out;
  out["command"] = "oracle";
  out["algorithm"] = "exhaustive_search";
  out["objective"] = std::string(to_string(kind));
  out.update(problem_header(problem, options));
  out["enumeration_cap"] = options.enumeration_cap;
  out["enumerated"] = result.enumerated;
  out["seeds"] = seed_array(result.best_set);
  out["value"] = result.best_value;
  out["total"] = result.best_total;
  out["wall_time"] = clock.elapsed();
  return out;
}

json estimate_json(const ObjectiveEstimate& estimate) {
  json out;
  out["kind"] = std::string(to_string(estimate.kind));
  out["mean"] = estimate.mean;
  out["std_error"] = estimate.std_error;
  out["r"] = estimate.scenario_count;
  out["seed_set"] = seed_array(estimate.seed_set);
  return out;
}

}  // namespace elex

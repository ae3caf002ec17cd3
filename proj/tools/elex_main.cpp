#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "elex/cascade.hpp"
#include "elex/format.hpp"
#include "elex/harness.hpp"
#include "elex/milp.hpp"
#include "elex/random.hpp"

namespace {

using namespace elex;

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + out_path);
}

void write_json(const std::string& out_path, const json& value) {
  write_text(out_path, value.dump(2) + "\n");
}

/// Flags shared by every subcommand that loads a problem instance.
struct ProblemArgs {
  std::string graph_path;
  std::string prefs_path;
  double default_prob = -1.0;  // <0: edge list must carry its own probabilities
  bool symmetrize = false;
  std::string mode_name = "constructive";
  std::size_t budget = 1;

  void attach(CLI::App& cmd, bool needs_prefs) {
    cmd.add_option("--graph", graph_path, "edge list file")->required();
    cmd.add_option("--p", default_prob, "activation probability for edges without one");
    cmd.add_flag("--symmetrize", symmetrize, "insert the reverse of every edge");
    if (needs_prefs) {
      cmd.add_option("--prefs", prefs_path, "preference profile file")->required();
      cmd.add_option("--mode", mode_name, "constructive or destructive")
          ->check(CLI::IsMember({"constructive", "destructive"}));
      cmd.add_option("--k", budget, "seed budget")->required();
    }
  }

  DirectedGraph load_graph() const {
    std::optional<double> prob;
    if (default_prob >= 0.0) prob = default_prob;
    return DirectedGraph::load_edge_list(graph_path, prob, symmetrize);
  }

  ControlProblem load_problem() const {
    DirectedGraph graph = load_graph();
    PreferenceProfile profile = PreferenceProfile::load(prefs_path);
    return ControlProblem(std::move(graph), std::move(profile), mode_from_string(mode_name),
                          static_cast<NodeId>(budget));
  }
};

ThresholdSchedule make_schedule(const ControlProblem& problem, const std::string& spec,
                                std::uint64_t seed) {
  const auto [lo, hi] = cap_range(problem);
  if (spec == "exhaustive") return ThresholdSchedule::exhaustive(lo, hi);
  constexpr std::string_view kSampled = "sampled:";
  if (spec.rfind(kSampled, 0) == 0) {
    const std::uint64_t count = parse_uint(spec.substr(kSampled.size()), "--thresholds count");
    return ThresholdSchedule::sampled(lo, hi, count, derive_seed(seed, 151));
  }
  throw CLI::ValidationError("--thresholds", "expected 'exhaustive' or 'sampled:N'");
}

int run(int argc, char** argv) {
  CLI::App app{
      "Election control through social influence: cascade sampling, seed-set optimization "
      "for margin and win-probability objectives, exact oracles, and MILP export."};
  app.require_subcommand(1);

  // sample ------------------------------------------------------------------
  auto* sample_cmd = app.add_subcommand("sample", "draw a scenario batch and dump it");
  ProblemArgs sample_args;
  sample_args.attach(*sample_cmd, false);
  std::size_t sample_count = 1000;
  std::uint64_t sample_seed = 1;
  std::string sample_out;
  sample_cmd->add_option("--scenarios", sample_count, "batch size");
  sample_cmd->add_option("--seed", sample_seed, "master seed");
  sample_cmd->add_option("--out", sample_out, "output file")->required();

  // mov / pov / oracle ------------------------------------------------------
  auto* mov_cmd = app.add_subcommand("mov", "greedy seed selection for the expected margin");
  auto* pov_cmd = app.add_subcommand("pov", "threshold search for the win probability");
  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive exact optimization");
  ProblemArgs mov_args;
  ProblemArgs pov_args;
  ProblemArgs oracle_args;
  mov_args.attach(*mov_cmd, true);
  pov_args.attach(*pov_cmd, true);
  oracle_args.attach(*oracle_cmd, true);

  RunOptions mov_options;
  RunOptions pov_options;
  RunOptions oracle_options;
  std::string mov_out;
  std::string pov_out;
  std::string oracle_out;
  std::string thresholds_spec;
  std::string oracle_objective = "mov";
  for (auto [cmd, options, out] : {std::tuple{mov_cmd, &mov_options, &mov_out},
                                   std::tuple{pov_cmd, &pov_options, &pov_out},
                                   std::tuple{oracle_cmd, &oracle_options, &oracle_out}}) {
    cmd->add_option("--scenarios", options->scenario_count, "batch size");
    cmd->add_option("--seed", options->seed, "master seed");
    cmd->add_option("--threads", options->threads, "worker threads")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--timing", options->timing, "report wall time instead of null");
    cmd->add_option("--out", *out, "output file (default: stdout)");
  }
  pov_cmd->add_option("--thresholds", thresholds_spec, "exhaustive or sampled:N");
  oracle_cmd->add_option("--objective", oracle_objective, "mov or pov")
      ->check(CLI::IsMember({"mov", "pov"}));
  oracle_cmd->add_option("--enum-cap", oracle_options.enumeration_cap,
                         "maximum number of seed sets to enumerate");

  // milp-export ---------------------------------------------------------------
  auto* milp_cmd = app.add_subcommand("milp-export", "write the exact model as an LP file");
  ProblemArgs milp_args;
  milp_args.attach(*milp_cmd, true);
  std::string milp_objective = "mov";
  std::size_t milp_scenarios = 8;
  std::uint64_t milp_seed = 1;
  std::string milp_out;
  std::string mps_out;
  milp_cmd->add_option("--objective", milp_objective, "mov or pov")
      ->check(CLI::IsMember({"mov", "pov"}));
  milp_cmd->add_option("--scenarios", milp_scenarios, "batch size");
  milp_cmd->add_option("--seed", milp_seed, "master seed");
  milp_cmd->add_option("--out", milp_out, "LP output file")->required();
  milp_cmd->add_option("--mps", mps_out, "also write fixed-form MPS to this file");

  // gen-prefs -----------------------------------------------------------------
  auto* prefs_cmd = app.add_subcommand("gen-prefs", "generate a random preference profile");
  std::size_t prefs_voters = 0;
  std::size_t prefs_candidates = 2;
  std::uint64_t prefs_seed = 1;
  double prefs_bias = -1.0;
  std::string prefs_out;
  prefs_cmd->add_option("--voters", prefs_voters, "number of voters")->required();
  prefs_cmd->add_option("--candidates", prefs_candidates, "number of candidates")->required();
  prefs_cmd->add_option("--seed", prefs_seed, "rng seed");
  prefs_cmd->add_option("--bias", prefs_bias,
                        "probability that candidate 0 takes the top spot (default: uniform)");
  prefs_cmd->add_option("--out", prefs_out, "output file")->required();

  // ratio-study ---------------------------------------------------------------
  auto* study_cmd = app.add_subcommand("ratio-study", "approximation vs exact oracle grid");
  StudyConfig study;
  std::vector<std::string> study_modes = {"constructive"};
  std::vector<std::string> study_objectives = {"mov"};
  std::string study_format = "json";
  std::string study_out;
  study_cmd->add_option("--nodes", study.nodes, "graph size");
  study_cmd->add_option("--edge-prob", study.edge_prob, "edge probability");
  study_cmd->add_option("--p", study.activation_prob, "activation probability");
  study_cmd->add_option("--k", study.budgets, "seed budgets (repeatable)");
  study_cmd->add_option("--candidates", study.candidate_counts, "candidate counts (repeatable)");
  study_cmd->add_option("--mode", study_modes, "modes (repeatable)");
  study_cmd->add_option("--objective", study_objectives, "objectives (repeatable)");
  study_cmd->add_option("--trials", study.trials, "instances per cell");
  study_cmd->add_option("--scenarios", study.scenario_count, "shared batch size");
  study_cmd->add_option("--seed", study.master_seed, "master seed");
  study_cmd->add_option("--enum-cap", study.enumeration_cap, "oracle enumeration cap");
  study_cmd->add_option("--threads", study.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  study_cmd->add_option("--format", study_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  study_cmd->add_option("--out", study_out, "output file (default: stdout)");

  // pov-sweep -----------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("pov-sweep", "win probability against starting margin");
  SweepConfig sweep;
  std::string sweep_mode = "constructive";
  std::string sweep_format = "json";
  std::string sweep_out;
  sweep_cmd->add_option("--nodes", sweep.nodes, "graph size");
  sweep_cmd->add_option("--edge-prob", sweep.edge_prob, "edge probability");
  sweep_cmd->add_option("--p", sweep.activation_prob, "activation probability");
  sweep_cmd->add_option("--candidates", sweep.candidates, "candidate count");
  sweep_cmd->add_option("--k", sweep.budget, "seed budget");
  sweep_cmd->add_option("--mode", sweep_mode, "constructive or destructive")
      ->check(CLI::IsMember({"constructive", "destructive"}));
  sweep_cmd->add_option("--instances", sweep.instances, "number of generated elections");
  sweep_cmd->add_option("--scenarios", sweep.scenario_count, "shared batch size");
  sweep_cmd->add_option("--bias-lo", sweep.bias_lo, "starting alignment of the first instance");
  sweep_cmd->add_option("--bias-hi", sweep.bias_hi, "starting alignment of the last instance");
  sweep_cmd->add_option("--seed", sweep.master_seed, "master seed");
  sweep_cmd->add_option("--enum-cap", sweep.enumeration_cap, "oracle enumeration cap");
  sweep_cmd->add_option("--threads", sweep.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--format", sweep_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sweep_cmd->add_option("--out", sweep_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(sample_cmd)) {
    const DirectedGraph graph = sample_args.load_graph();
    const ScenarioBatch batch = sample_batch(graph, sample_count, sample_seed);
    save_scenarios(batch, sample_out);
    return 0;
  }
  if (app.got_subcommand(mov_cmd)) {
    const ControlProblem problem = mov_args.load_problem();
    write_json(mov_out, run_mov_command(problem, mov_options));
    return 0;
  }
  if (app.got_subcommand(pov_cmd)) {
    const ControlProblem problem = pov_args.load_problem();
    if (!thresholds_spec.empty()) {
      pov_options.schedule = make_schedule(problem, thresholds_spec, pov_options.seed);
    }
    write_json(pov_out, run_pov_command(problem, pov_options));
    return 0;
  }
  if (app.got_subcommand(oracle_cmd)) {
    const ControlProblem problem = oracle_args.load_problem();
    write_json(oracle_out,
               run_oracle_command(problem, objective_from_string(oracle_objective),
                                  oracle_options));
    return 0;
  }
  if (app.got_subcommand(milp_cmd)) {
    const ControlProblem problem = milp_args.load_problem();
    const ScenarioBatch batch = sample_batch(problem.graph, milp_scenarios, milp_seed);
    const MilpModel model = build_milp(problem, batch, milp_args.budget,
                                       objective_from_string(milp_objective));
    export_lp(model, milp_out);
    if (!mps_out.empty()) export_mps(model, mps_out);
    return 0;
  }
  if (app.got_subcommand(prefs_cmd)) {
    const PreferenceProfile profile =
        prefs_bias >= 0.0
            ? generate_biased_profile(static_cast<NodeId>(prefs_voters),
                                      static_cast<CandidateId>(prefs_candidates), prefs_bias,
                                      prefs_seed)
            : generate_profile(static_cast<NodeId>(prefs_voters),
                               static_cast<CandidateId>(prefs_candidates), prefs_seed);
    profile.save(prefs_out);
    return 0;
  }
  if (app.got_subcommand(study_cmd)) {
    study.modes.clear();
    for (const std::string& name : study_modes) study.modes.push_back(mode_from_string(name));
    study.objectives.clear();
    for (const std::string& name : study_objectives) {
      study.objectives.push_back(objective_from_string(name));
    }
    const RatioStudyResult result = run_ratio_study(study);
    if (study_format == "csv") {
      write_text(study_out, study_csv(result));
    } else {
      write_json(study_out, study_json(result));
    }
    return 0;
  }
  if (app.got_subcommand(sweep_cmd)) {
    sweep.mode = mode_from_string(sweep_mode);
    const SweepResult result = run_pov_sweep(sweep);
    if (sweep_format == "csv") {
      write_text(sweep_out, sweep_csv(result));
    } else {
      write_json(sweep_out, sweep_json(result));
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}

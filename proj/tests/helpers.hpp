#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <tuple>
#include <unistd.h>
#include <vector>

#include "elex/cascade.hpp"
#include "elex/election.hpp"
#include "elex/graph.hpp"
#include "elex/harness.hpp"
#include "elex/objectives.hpp"
#include "elex/random.hpp"

namespace elex::testing {

// Unique scratch path; tests clean up after themselves but never collide
// even when they do not.
inline std::filesystem::path temp_path(const std::string& stem) {
  static std::atomic<int> counter{0};
  return std::filesystem::temp_directory_path() /
         (stem + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
}

inline DirectedGraph make_graph(NodeId nodes,
                                std::vector<std::tuple<NodeId, NodeId, double>> edge_list) {
  std::vector<Edge> edges;
  edges.reserve(edge_list.size());
  for (auto [u, v, p] : edge_list) edges.push_back({u, v, p});
  return DirectedGraph(nodes, std::move(edges));
}

inline PreferenceProfile make_profile(std::vector<std::vector<CandidateId>> rankings,
                                      CandidateId candidates = 0) {
  if (candidates == 0) return PreferenceProfile(std::move(rankings));
  return PreferenceProfile(std::move(rankings), candidates);
}

// Five voters on a star: node 0 points at 1, 2, 3 with certain edges, node 4
// is isolated. Voters 1, 2, 3 prefer the rival, voters 0 and 4 prefer
// candidate 0, so the rival leads 3-2 and one flipped voter wins.
inline ControlProblem star_problem(std::size_t k = 1) {
  auto graph = make_graph(5, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  auto profile = make_profile({{0, 1}, {1, 0}, {1, 0}, {1, 0}, {0, 1}});
  return ControlProblem(std::move(graph), std::move(profile), Mode::constructive,
                        static_cast<NodeId>(k));
}

// Three nodes chained 0 -> 1 -> 2 with certain edges; every voter puts the
// rival first, so the rival leads 3-0.
inline ControlProblem path_problem(std::size_t k = 1) {
  auto graph = make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  auto profile = make_profile({{1, 0}, {1, 0}, {1, 0}});
  return ControlProblem(std::move(graph), std::move(profile), Mode::constructive,
                        static_cast<NodeId>(k));
}

// Same chain with candidate 0 leading 3-0; used for demotion runs.
inline ControlProblem path_problem_destructive(std::size_t k = 1) {
  auto graph = make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  auto profile = make_profile({{0, 1}, {0, 1}, {0, 1}});
  return ControlProblem(std::move(graph), std::move(profile), Mode::destructive,
                        static_cast<NodeId>(k));
}

// Two voters, one coin-flip edge 0 -> 1, both voters rank candidate 0 second.
inline ControlProblem prob_problem(std::size_t k = 1) {
  auto graph = make_graph(2, {{0, 1, 0.5}});
  auto profile = make_profile({{1, 0}, {1, 0}});
  return ControlProblem(std::move(graph), std::move(profile), Mode::constructive,
                        static_cast<NodeId>(k));
}

// Three isolated voters over three candidates with a tied 1-1-1 tally.
inline ControlProblem three_way_problem(std::size_t k = 1) {
  auto graph = make_graph(3, {});
  auto profile = make_profile({{1, 0, 2}, {2, 0, 1}, {0, 1, 2}});
  return ControlProblem(std::move(graph), std::move(profile), Mode::constructive,
                        static_cast<NodeId>(k));
}

// Two isolated voters, candidate 0 first for voter 0 only; demotion targets.
inline ControlProblem demotion_pair_problem(std::size_t k = 1) {
  auto graph = make_graph(2, {});
  auto profile = make_profile({{0, 1, 2}, {1, 0, 2}});
  return ControlProblem(std::move(graph), std::move(profile), Mode::destructive,
                        static_cast<NodeId>(k));
}

// Random Erdos-Renyi instance with uniform preferences; the workhorse for
// property tests.
inline ControlProblem random_problem(NodeId nodes, CandidateId candidates, double edge_prob,
                                     double activation_prob, Mode mode, std::size_t k,
                                     std::uint64_t seed) {
  auto graph = erdos_renyi(nodes, edge_prob, activation_prob, derive_seed(seed, 0));
  auto profile = generate_profile(nodes, candidates, derive_seed(seed, 1));
  return ControlProblem(std::move(graph), std::move(profile), mode, static_cast<NodeId>(k));
}

// Influence indicator evaluated the slow way, one reverse walk per voter.
inline std::vector<bool> influenced_flags(const ControlProblem& problem, const Scenario& scenario,
                                          const std::vector<NodeId>& seeds) {
  std::vector<bool> flags(problem.graph.node_count(), false);
  for (NodeId v = 0; v < problem.graph.node_count(); ++v)
    flags[v] = reach_indicator(problem.graph, scenario, v, seeds);
  return flags;
}

// Per-rival gain computed straight from the voter sets: one point per
// influenced relevant voter, a second point when the voter also sits in the
// rival's crucial set.
inline std::int64_t reference_gain(const ControlProblem& problem, const Scenario& scenario,
                                   const std::vector<NodeId>& seeds, CandidateId rival) {
  const auto& profile = problem.profile;
  const bool constructive = problem.mode == Mode::constructive;
  auto relevant = profile.voter_set(kTargetCandidate, constructive ? 2 : 1);
  auto crucial = profile.voter_set(rival, constructive ? 1 : 2);
  auto flags = influenced_flags(problem, scenario, seeds);
  std::int64_t total = 0;
  for (NodeId v : relevant) {
    if (!flags[v]) continue;
    total += std::binary_search(crucial.begin(), crucial.end(), v) ? 2 : 1;
  }
  return total;
}

// Margin formula assembled from reference_gain and the initial tallies,
// independent of the production bitset evaluator.
inline std::int64_t reference_margin(const ControlProblem& problem, const Scenario& scenario,
                                     const std::vector<NodeId>& seeds) {
  const auto tally = problem.profile.initial_tally();
  std::int64_t best_rival = 0;
  for (CandidateId c = 1; c < problem.profile.candidate_count(); ++c)
    best_rival = std::max(best_rival, tally[c]);
  if (problem.mode == Mode::constructive) {
    std::int64_t margin = std::numeric_limits<std::int64_t>::max();
    for (CandidateId c = 1; c < problem.profile.candidate_count(); ++c)
      margin = std::min(margin,
                        reference_gain(problem, scenario, seeds, c) + best_rival - tally[c]);
    return margin;
  }
  std::int64_t margin = std::numeric_limits<std::int64_t>::min();
  for (CandidateId c = 1; c < problem.profile.candidate_count(); ++c)
    margin = std::max(margin, reference_gain(problem, scenario, seeds, c) + tally[c] - best_rival);
  return margin;
}

// Quadratic greedy with the same tie-breaking the production path promises:
// largest gain first, then smallest node id.
inline std::vector<NodeId> reference_greedy(
    const std::function<std::int64_t(const std::vector<NodeId>&)>& h,
    const std::vector<NodeId>& ground, std::size_t k) {
  std::vector<NodeId> chosen;
  std::int64_t current = h(chosen);
  while (chosen.size() < k && chosen.size() < ground.size()) {
    NodeId best_node = 0;
    std::int64_t best_gain = std::numeric_limits<std::int64_t>::min();
    bool found = false;
    for (NodeId v : ground) {
      if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
      auto trial = chosen;
      trial.push_back(v);
      std::int64_t gain = h(trial) - current;
      if (!found || gain > best_gain || (gain == best_gain && v < best_node)) {
        best_node = v;
        best_gain = gain;
        found = true;
      }
    }
    chosen.push_back(best_node);
    current += best_gain;
  }
  return chosen;
}

// Calls fn on every subset of {0..n-1} with at most k elements, ascending.
inline void for_each_subset(NodeId n, std::size_t k,
                            const std::function<void(const std::vector<NodeId>&)>& fn) {
  std::vector<NodeId> current;
  std::function<void(NodeId)> descend = [&](NodeId next) {
    fn(current);
    if (current.size() == k) return;
    for (NodeId v = next; v < n; ++v) {
      current.push_back(v);
      descend(v + 1);
      current.pop_back();
    }
  };
  descend(0);
}

}  // namespace elex::testing

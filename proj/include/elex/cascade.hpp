#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "elex/bitset.hpp"
#include "elex/graph.hpp"

namespace elex {

/// One live-edge draw of the graph: influence spreads along exactly the live
/// edges, so "influenced by S" means reachable from S in this subgraph.
struct Scenario {
  std::uint32_t index = 0;        // position within its batch
  std::uint64_t stream_seed = 0;  // RNG stream this scenario was drawn from
  DynamicBitset live;             // one bit per canonical edge index

  bool edge_live(std::size_t e) const { return live.test(e); }
};

struct ScenarioBatch {
  std::uint64_t master_seed = 0;
  std::vector<Scenario> scenarios;

  std::size_t size() const { return scenarios.size(); }
};

/// Draws r independent scenarios. Scenario i uses its own RNG stream derived
/// from (master_seed, i), so the batch is identical no matter how many
/// workers sample it.
ScenarioBatch sample_batch(const DirectedGraph& graph, std::size_t r, std::uint64_t master_seed,
                           int threads = 1);

/// Every combination of the edges with 0 < p < 1; edges with p = 1 are always
/// live and p = 0 never. Requires all fractional probabilities to be exactly
/// 0.5 (so the scenarios are equiprobable and a plain average is the exact
/// expectation) and at most 20 fractional edges.
ScenarioBatch exhaustive_batch(const DirectedGraph& graph);

/// Compact text dump: see docs/formats.md. Round-trips a batch exactly.
void save_scenarios(const ScenarioBatch& batch, const std::filesystem::path& file);
ScenarioBatch load_scenarios(const DirectedGraph& graph, const std::filesystem::path& file);

/// Nodes reachable from `seeds` over live edges; seeds are always included.
DynamicBitset reach_set(const DirectedGraph& graph, const Scenario& scenario,
                        std::span<const NodeId> seeds);

/// |reach_set(seeds) ∩ targets|.
std::int64_t reach_count(const DirectedGraph& graph, const Scenario& scenario,
                         std::span<const NodeId> seeds, const DynamicBitset& targets);

/// Whether node v is influenced by `seeds`. Walks live edges backwards from
/// v, a deliberately separate code path used to cross-check reach_set.
bool reach_indicator(const DirectedGraph& graph, const Scenario& scenario, NodeId v,
                     std::span<const NodeId> seeds);

/// forward[v] = reach_set({v}) for every v, computed once per scenario via
/// SCC condensation; the reach of a set is the union of its members' rows.
std::vector<DynamicBitset> forward_reach_index(const DirectedGraph& graph,
                                               const Scenario& scenario);

/// reverse[v] = the nodes that can influence v (v included).
std::vector<DynamicBitset> reverse_reach_sets(const DirectedGraph& graph,
                                              const Scenario& scenario);

}  // namespace elex

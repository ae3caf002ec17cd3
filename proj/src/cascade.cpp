#include "elex/cascade.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "elex/format.hpp"
#include "elex/parallel.hpp"
#include "elex/random.hpp"

namespace elex {

ScenarioBatch sample_batch(const DirectedGraph& graph, std::size_t r, std::uint64_t master_seed,
                           int threads) {
  if (r == 0) throw std::invalid_argument("scenario count must be positive");
  ScenarioBatch batch;
  batch.master_seed = master_seed;
  batch.scenarios.resize(r);
  const auto edges = graph.edges();
  parallel_for(r, threads, [&](std::size_t i) {
    Scenario& s = batch.scenarios[i];
    s.index = static_cast<std::uint32_t>(i);
    s.stream_seed = derive_seed(master_seed, i);
    s.live = DynamicBitset(edges.size());
    Rng rng(s.stream_seed);
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (canonical_double(rng) < edges[e].prob) s.live.set(e);
  });
  return batch;
}

ScenarioBatch exhaustive_batch(const DirectedGraph& graph) {
  const auto edges = graph.edges();
  std::vector<std::size_t> certain, fractional;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    double p = edges[e].prob;
    if (p == 1.0) {
      certain.push_back(e);
    } else if (p == 0.5) {
      fractional.push_back(e);
    } else if (p != 0.0) {
      throw std::invalid_argument(
          "exhaustive_batch needs edge probabilities in {0, 0.5, 1}; edge " + std::to_string(e) +
          " has p = " + format_double(p));
    }
  }
  if (fractional.size() > 20)
    throw std::invalid_argument("exhaustive_batch limited to 20 fractional edges, got " +
                                std::to_string(fractional.size()));
  ScenarioBatch batch;
  std::size_t r = std::size_t{1} << fractional.size();
  batch.scenarios.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    Scenario& s = batch.scenarios[j];
    s.index = static_cast<std::uint32_t>(j);
    s.live = DynamicBitset(edges.size());
    for (std::size_t e : certain) s.live.set(e);
    for (std::size_t b = 0; b < fractional.size(); ++b)
      if ((j >> b) & 1u) s.live.set(fractional[b]);
  }
  return batch;
}

void save_scenarios(const ScenarioBatch& batch, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write scenario file: " + file.string());
  std::size_t edge_bits = batch.scenarios.empty() ? 0 : batch.scenarios.front().live.size();
  out << "# scenario batch\n";
  out << batch.size() << ' ' << edge_bits << ' ' << batch.master_seed << "\n";
  for (const Scenario& s : batch.scenarios) {
    out << s.stream_seed;
    for (std::uint32_t e : s.live.to_indices()) out << ' ' << e;
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

ScenarioBatch load_scenarios(const DirectedGraph& graph, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open scenario file: " + file.string());
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view what) {
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view sv(line);
      while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
      if (sv.empty() || sv.front() == '#') continue;
      return std::string(sv);
    }
    throw std::runtime_error(file.string() + ": unexpected end of file, expected " +
                             std::string(what));
  };

  std::istringstream header(next_line("batch header"));
  std::string tr, tm, tseed;
  if (!(header >> tr >> tm >> tseed))
    throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                             ": malformed batch header");
  std::size_t r = parse_uint(tr, "scenario count");
  std::size_t edge_bits = parse_uint(tm, "edge count");
  if (edge_bits != graph.edge_count())
    throw std::runtime_error(file.string() + ": batch was drawn for " + std::to_string(edge_bits) +
                             " edges but the graph has " + std::to_string(graph.edge_count()));
  ScenarioBatch batch;
  batch.master_seed = parse_uint(tseed, "master seed");
  batch.scenarios.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    std::istringstream ls(next_line("scenario record"));
    Scenario& s = batch.scenarios[i];
    s.index = static_cast<std::uint32_t>(i);
    s.live = DynamicBitset(graph.edge_count());
    std::string token;
    if (!(ls >> token))
      throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                               ": missing stream seed");
    s.stream_seed = parse_uint(token, "stream seed");
    while (ls >> token) {
      std::size_t e = parse_uint(token, "edge index");
      if (e >= graph.edge_count())
        throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                 ": edge index " + token + " out of range");
      s.live.set(e);
    }
  }
  return batch;
}

namespace {

void check_seeds(const DirectedGraph& graph, std::span<const NodeId> seeds) {
  for (NodeId s : seeds)
    if (s >= graph.node_count()) throw std::out_of_range("seed id out of range");
}

void check_scenario(const DirectedGraph& graph, const Scenario& scenario) {
  if (scenario.live.size() != graph.edge_count())
    throw std::invalid_argument("scenario edge mask does not match the graph");
}

}  // namespace

DynamicBitset reach_set(const DirectedGraph& graph, const Scenario& scenario,
                        std::span<const NodeId> seeds) {
  check_seeds(graph, seeds);
  check_scenario(graph, scenario);
  DynamicBitset visited(graph.node_count());
  std::vector<NodeId> stack;
  for (NodeId s : seeds) {
    if (visited.test(s)) continue;
    visited.set(s);
    stack.push_back(s);
  }
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    std::size_t base = graph.out_offset(v);
    auto out = graph.out_edges(v);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!scenario.edge_live(base + i)) continue;
      NodeId w = out[i].target;
      if (visited.test(w)) continue;
      visited.set(w);
      stack.push_back(w);
    }
  }
  return visited;
}

std::int64_t reach_count(const DirectedGraph& graph, const Scenario& scenario,
                         std::span<const NodeId> seeds, const DynamicBitset& targets) {
  return static_cast<std::int64_t>(reach_set(graph, scenario, seeds).count_and(targets));
}

bool reach_indicator(const DirectedGraph& graph, const Scenario& scenario, NodeId v,
                     std::span<const NodeId> seeds) {
  check_seeds(graph, seeds);
  check_scenario(graph, scenario);
  if (v >= graph.node_count()) throw std::out_of_range("node id out of range");
  std::vector<bool> is_seed(graph.node_count(), false);
  for (NodeId s : seeds) is_seed[s] = true;
  if (is_seed[v]) return true;
  // Live in-edges per node, so the walk runs from v toward potential seeds.
  std::vector<std::vector<NodeId>> in_live(graph.node_count());
  const auto edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (scenario.edge_live(e)) in_live[edges[e].target].push_back(edges[e].source);
  std::vector<bool> visited(graph.node_count(), false);
  std::vector<NodeId> stack{v};
  visited[v] = true;
  while (!stack.empty()) {
    NodeId w = stack.back();
    stack.pop_back();
    for (NodeId u : in_live[w]) {
      if (visited[u]) continue;
      if (is_seed[u]) return true;
      visited[u] = true;
      stack.push_back(u);
    }
  }
  return false;
}

std::vector<DynamicBitset> forward_reach_index(const DirectedGraph& graph,
                                               const Scenario& scenario) {
  check_scenario(graph, scenario);
  const NodeId n = graph.node_count();
  constexpr std::uint32_t kUnvisited = ~std::uint32_t{0};

  // Tarjan over the live subgraph; components come out sinks-first, which is
  // exactly the order the reach DP below needs.
  std::vector<std::uint32_t> order(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<NodeId> scc_stack;
  std::vector<bool> on_stack(n, false);
  struct Frame {
    NodeId v;
    std::size_t edge;
    std::size_t edge_end;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0, comp_count = 0;

  for (NodeId root = 0; root < n; ++root) {
    if (order[root] != kUnvisited) continue;
    order[root] = low[root] = counter++;
    scc_stack.push_back(root);
    on_stack[root] = true;
    call.push_back({root, graph.out_offset(root), graph.out_offset(root) + graph.out_edges(root).size()});
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < f.edge_end) {
        std::size_t e = f.edge++;
        if (!scenario.edge_live(e)) continue;
        NodeId w = graph.edges()[e].target;
        if (order[w] == kUnvisited) {
          order[w] = low[w] = counter++;
          scc_stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, graph.out_offset(w), graph.out_offset(w) + graph.out_edges(w).size()});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], order[w]);
        }
      } else {
        NodeId v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == order[v]) {
          for (;;) {
            NodeId w = scc_stack.back();
            scc_stack.pop_back();
            on_stack[w] = false;
            comp[w] = comp_count;
            if (w == v) break;
          }
          ++comp_count;
        }
      }
    }
  }

  // comp ids increase from sinks to sources, so every live edge u -> w has
  // comp[w] <= comp[u] and the union below reads only finished rows.
  std::vector<std::vector<NodeId>> members(comp_count);
  for (NodeId v = 0; v < n; ++v) members[comp[v]].push_back(v);
  std::vector<DynamicBitset> comp_reach(comp_count, DynamicBitset(n));
  for (std::uint32_t c = 0; c < comp_count; ++c) {
    for (NodeId v : members[c]) comp_reach[c].set(v);
    for (NodeId v : members[c]) {
      std::size_t base = graph.out_offset(v);
      auto out = graph.out_edges(v);
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!scenario.edge_live(base + i)) continue;
        std::uint32_t d = comp[out[i].target];
        if (d != c) comp_reach[c] |= comp_reach[d];
      }
    }
  }

  std::vector<DynamicBitset> result;
  result.reserve(n);
  for (NodeId v = 0; v < n; ++v) result.push_back(comp_reach[comp[v]]);
  return result;
}

std::vector<DynamicBitset> reverse_reach_sets(const DirectedGraph& graph,
                                              const Scenario& scenario) {
  const NodeId n = graph.node_count();
  auto forward = forward_reach_index(graph, scenario);
  std::vector<DynamicBitset> reverse(n, DynamicBitset(n));
  for (NodeId u = 0; u < n; ++u)
    for (std::uint32_t v : forward[u].to_indices()) reverse[v].set(u);
  return reverse;
}

}  // namespace elex

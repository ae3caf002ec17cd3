#include "elex/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "elex/format.hpp"

namespace elex {

namespace {

std::vector<std::string> default_labels(NodeId n) {
  std::vector<std::string> labels(n);
  for (NodeId v = 0; v < n; ++v) labels[v] = std::to_string(v);
  return labels;
}

}  // namespace

DirectedGraph::DirectedGraph(NodeId node_count, std::vector<Edge> edges,
                             std::vector<std::string> labels)
    : node_count_(node_count), edges_(std::move(edges)), labels_(std::move(labels)) {
  for (const Edge& e : edges_) {
    if (e.source >= node_count_ || e.target >= node_count_)
      throw std::invalid_argument("edge endpoint " + std::to_string(std::max(e.source, e.target)) +
                                  " outside node range 0.." + std::to_string(node_count_) + "-1");
    if (!(e.prob >= 0.0 && e.prob <= 1.0))
      throw std::invalid_argument("edge probability " + format_double(e.prob) +
                                  " outside [0, 1]");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i].source == edges_[i - 1].source && edges_[i].target == edges_[i - 1].target)
      throw std::invalid_argument("duplicate edge " + std::to_string(edges_[i].source) + " -> " +
                                  std::to_string(edges_[i].target));
  offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) ++offsets_[e.source + 1];
  for (NodeId v = 0; v < node_count_; ++v) offsets_[v + 1] += offsets_[v];
  if (labels_.empty())
    labels_ = default_labels(node_count_);
  else if (labels_.size() != node_count_)
    throw std::invalid_argument("label count does not match node count");
}

const Edge& DirectedGraph::edge(std::size_t index) const {
  if (index >= edges_.size()) throw std::out_of_range("edge index out of range");
  return edges_[index];
}

std::span<const Edge> DirectedGraph::out_edges(NodeId v) const {
  if (v >= node_count_) throw std::out_of_range("node id out of range");
  return {edges_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::size_t DirectedGraph::out_offset(NodeId v) const {
  if (v >= node_count_) throw std::out_of_range("node id out of range");
  return offsets_[v];
}

DirectedGraph DirectedGraph::load_edge_list(const std::filesystem::path& file,
                                            std::optional<double> default_prob, bool symmetrize) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open edge list: " + file.string());

  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  auto intern = [&](const std::string& token) {
    auto [it, fresh] = ids.try_emplace(token, static_cast<NodeId>(labels.size()));
    if (fresh) labels.push_back(token);
    return it->second;
  };

  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  bool declared = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      // "# nodes: N" pre-registers dense ids; any other comment is skipped.
      std::istringstream cs{std::string(sv.substr(1))};
      std::string word;
      if (cs >> word && word == "nodes:") {
        std::string num;
        if (!(cs >> num))
          throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                   ": malformed '# nodes:' directive");
        if (declared || !labels.empty())
          throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                   ": '# nodes:' must appear before any edge");
        auto n = parse_uint(num, "node count");
        for (std::uint64_t v = 0; v < n; ++v) intern(std::to_string(v));
        declared = true;
      }
      continue;
    }
    std::istringstream ls{std::string(sv)};
    std::string tu, tv, tp;
    ls >> tu >> tv;
    if (tv.empty())
      throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                               ": expected 'u v [p]'");
    double prob;
    if (ls >> tp) {
      prob = parse_double(tp, "edge probability");
    } else if (default_prob) {
      prob = *default_prob;
    } else {
      throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                               ": line omits probability and no default was given");
    }
    std::string extra;
    if (ls >> extra)
      throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                               ": trailing token '" + extra + "'");
    if (declared && (!ids.count(tu) || !ids.count(tv)))
      throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                               ": node id outside the declared '# nodes:' range");
    NodeId u = intern(tu), v = intern(tv);
    edges.push_back({u, v, prob});
    if (symmetrize) edges.push_back({v, u, prob});
  }
  const NodeId node_count = static_cast<NodeId>(labels.size());
  try {
    return DirectedGraph(node_count, std::move(edges), std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(file.string() + ": " + e.what() +
                             (symmetrize ? " (after symmetrizing)" : ""));
  }
}

void DirectedGraph::write_edge_list(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write edge list: " + file.string());
  out << "# nodes: " << node_count_ << "\n";
  for (const Edge& e : edges_)
    out << e.source << ' ' << e.target << ' ' << format_double(e.prob) << "\n";
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace elex

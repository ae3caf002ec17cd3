#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace elex {

using NodeId = std::uint32_t;

struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  double prob = 0.0;  // independent transmission probability, in [0, 1]
};

/// Immutable directed graph over dense node ids 0..n-1.
///
/// Edges are stored sorted by (source, target) and never change after
/// construction, so a scenario can refer to them by position. Self-loops are
/// allowed (they never change reachability); duplicate (source, target) pairs
/// are rejected.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  DirectedGraph(NodeId node_count, std::vector<Edge> edges, std::vector<std::string> labels = {});

  /// Reads "u v [p]" lines; '#' starts a comment. Node ids may be arbitrary
  /// strings and are remapped to dense integers in first-appearance order,
  /// except that a leading "# nodes: N" directive (emitted by
  /// write_edge_list) pre-registers ids 0..N-1 so isolated nodes and id order
  /// survive a round trip. Lines without p take default_prob; with
  /// symmetrize, every line yields both directions.
  static DirectedGraph load_edge_list(const std::filesystem::path& file,
                                      std::optional<double> default_prob = std::nullopt,
                                      bool symmetrize = false);

  /// Writes the canonical form ("# nodes: N" directive, dense integer ids,
  /// one edge per line); re-loading yields an identical graph.
  void write_edge_list(const std::filesystem::path& file) const;

  NodeId node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(std::size_t index) const;

  /// Outgoing edges of v as a slice of the canonical edge array, targets
  /// ascending. The slice's offset within edges() is out_offset(v).
  std::span<const Edge> out_edges(NodeId v) const;
  std::size_t out_offset(NodeId v) const;

  /// Original ids from the input file; decimal strings when constructed
  /// directly.
  const std::vector<std::string>& node_labels() const { return labels_; }

 private:
  NodeId node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;  // CSR offsets, size node_count_ + 1
  std::vector<std::string> labels_;
};

}  // namespace elex

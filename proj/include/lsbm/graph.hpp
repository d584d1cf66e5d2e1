#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lsbm {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;          // undirected edge index
using DirectedEdgeId = std::uint32_t;  // 2k and 2k+1 are the two orientations of edge k
using Label = std::uint32_t;           // 1..p; 0 means "no edge" and is never stored

struct LabeledEdge {
  VertexId i;
  VertexId j;
  Label label;
};

struct Neighbor {
  VertexId vertex;
  Label label;
};

/// Immutable undirected graph whose edges carry one of p labels.
///
/// Every undirected edge k = (u, v) gets two directed ids: 2k for u->v and
/// 2k+1 for v->u, so reversing a directed edge is `e ^ 1`. Outgoing directed
/// edges of each vertex are stored contiguously (CSR) which is the access
/// pattern of both BP and the non-backtracking operator.
class LabeledGraph {
 public:
  /// Throws std::invalid_argument on self-loops, duplicate pairs (regardless
  /// of label or orientation), out-of-range vertices or labels.
  static LabeledGraph build(std::size_t num_vertices, std::size_t num_labels,
                            std::span<const LabeledEdge> edges);

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_labels() const { return num_labels_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_edges(Label label) const;
  std::size_t num_directed_edges() const { return 2 * edges_.size(); }

  const LabeledEdge& edge(EdgeId k) const { return edges_[k]; }
  std::span<const LabeledEdge> edges() const { return edges_; }
  /// Undirected edge indices carrying `label`.
  std::span<const EdgeId> edges_with_label(Label label) const;

  VertexId source(DirectedEdgeId e) const {
    const auto& ed = edges_[e >> 1];
    return (e & 1u) ? ed.j : ed.i;
  }
  VertexId target(DirectedEdgeId e) const {
    const auto& ed = edges_[e >> 1];
    return (e & 1u) ? ed.i : ed.j;
  }
  Label label(DirectedEdgeId e) const { return edges_[e >> 1].label; }

  /// Checked reversal; throws std::out_of_range for an invalid id.
  DirectedEdgeId reverse_edge(DirectedEdgeId e) const;

  /// Directed edges v->w for every neighbor w of v.
  std::span<const DirectedEdgeId> out_edges(VertexId v) const {
    return {out_.data() + offsets_[v], out_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::vector<Neighbor> adjacency(VertexId v) const;

 private:
  std::size_t num_vertices_ = 0;
  std::size_t num_labels_ = 0;
  std::vector<LabeledEdge> edges_;
  std::vector<std::vector<EdgeId>> by_label_;
  std::vector<std::size_t> offsets_;
  std::vector<DirectedEdgeId> out_;
};

/// Parses the `i<TAB>j<TAB>alpha` edge-list format (0-based vertices,
/// 1-based labels, `#` comments). When `num_vertices` or `num_labels` is zero
/// it is inferred from the largest id seen.
LabeledGraph read_edge_list(std::istream& in, std::size_t num_vertices = 0,
                            std::size_t num_labels = 0);
LabeledGraph read_edge_list_file(const std::string& path, std::size_t num_vertices = 0,
                                 std::size_t num_labels = 0);
void write_edge_list(std::ostream& out, const LabeledGraph& graph);

}  // namespace lsbm

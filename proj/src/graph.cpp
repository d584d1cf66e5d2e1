#include "lsbm/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace lsbm {

namespace {

std::string pair_text(VertexId i, VertexId j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

LabeledGraph LabeledGraph::build(std::size_t num_vertices, std::size_t num_labels,
                                 std::span<const LabeledEdge> edges) {
  if (num_labels == 0) throw std::invalid_argument("graph needs at least one label");
  LabeledGraph g;
  g.num_vertices_ = num_vertices;
  g.num_labels_ = num_labels;
  g.edges_.reserve(edges.size());
  g.by_label_.resize(num_labels);

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  std::vector<std::size_t> degree(num_vertices, 0);
  for (const auto& e : edges) {
    if (e.i >= num_vertices || e.j >= num_vertices)
      throw std::invalid_argument("vertex out of range in edge " + pair_text(e.i, e.j));
    if (e.i == e.j) throw std::invalid_argument("self-loop at vertex " + std::to_string(e.i));
    if (e.label < 1 || e.label > num_labels)
      throw std::invalid_argument("label " + std::to_string(e.label) + " out of range 1.." +
                                  std::to_string(num_labels) + " on edge " + pair_text(e.i, e.j));
    const std::uint64_t lo = std::min(e.i, e.j), hi = std::max(e.i, e.j);
    if (!seen.insert(lo * num_vertices + hi).second)
      throw std::invalid_argument("duplicate pair " + pair_text(e.i, e.j));
    g.by_label_[e.label - 1].push_back(static_cast<EdgeId>(g.edges_.size()));
    g.edges_.push_back(e);
    ++degree[e.i];
    ++degree[e.j];
  }

  g.offsets_.assign(num_vertices + 1, 0);
  for (std::size_t v = 0; v < num_vertices; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
  g.out_.resize(g.offsets_.back());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (EdgeId k = 0; k < g.edges_.size(); ++k) {
    g.out_[fill[g.edges_[k].i]++] = 2 * k;
    g.out_[fill[g.edges_[k].j]++] = 2 * k + 1;
  }
  return g;
}

std::size_t LabeledGraph::num_edges(Label label) const {
  return edges_with_label(label).size();
}

std::span<const EdgeId> LabeledGraph::edges_with_label(Label label) const {
  if (label < 1 || label > num_labels_)
    throw std::out_of_range("label " + std::to_string(label) + " out of range");
  return by_label_[label - 1];
}

DirectedEdgeId LabeledGraph::reverse_edge(DirectedEdgeId e) const {
  if (e >= num_directed_edges())
    throw std::out_of_range("directed edge id " + std::to_string(e) + " out of range");
  return e ^ 1u;
}

std::vector<Neighbor> LabeledGraph::adjacency(VertexId v) const {
  std::vector<Neighbor> out;
  out.reserve(degree(v));
  for (DirectedEdgeId e : out_edges(v)) out.push_back({target(e), label(e)});
  return out;
}

LabeledGraph read_edge_list(std::istream& in, std::size_t num_vertices, std::size_t num_labels) {
  std::vector<LabeledEdge> edges;
  std::size_t max_vertex = 0, max_label = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      // header written by write_edge_list; keeps isolated trailing vertices
      std::istringstream header(line.substr(1));
      std::string k1, k2;
      std::size_t n = 0, p = 0;
      if (header >> k1 >> n >> k2 >> p && k1 == "vertices" && k2 == "labels") {
        if (num_vertices == 0) num_vertices = n;
        if (num_labels == 0) num_labels = p;
      }
      continue;
    }
    std::istringstream fields(line);
    long long i = -1, j = -1, a = -1;
    if (!(fields >> i >> j >> a) || i < 0 || j < 0 || a < 1)
      throw std::invalid_argument("malformed edge on line " + std::to_string(line_no));
    edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), static_cast<Label>(a)});
    max_vertex = std::max<std::size_t>(max_vertex, std::max(i, j));
    max_label = std::max<std::size_t>(max_label, a);
  }
  if (num_vertices == 0) num_vertices = edges.empty() ? 0 : max_vertex + 1;
  if (num_labels == 0) num_labels = std::max<std::size_t>(max_label, 1);
  return LabeledGraph::build(num_vertices, num_labels, edges);
}

LabeledGraph read_edge_list_file(const std::string& path, std::size_t num_vertices,
                                 std::size_t num_labels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_edge_list(in, num_vertices, num_labels);
}

void write_edge_list(std::ostream& out, const LabeledGraph& graph) {
  out << "# vertices " << graph.num_vertices() << " labels " << graph.num_labels() << '\n';
  for (const auto& e : graph.edges()) out << e.i << '\t' << e.j << '\t' << e.label << '\n';
}

}  // namespace lsbm

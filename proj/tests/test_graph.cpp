#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "lsbm/graph.hpp"
#include "lsbm/random.hpp"

using namespace lsbm;

namespace {

LabeledGraph random_graph(std::size_t n, std::size_t p, std::size_t m, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  std::uniform_int_distribution<Label> lab(1, static_cast<Label>(p));
  std::set<std::pair<VertexId, VertexId>> seen;
  std::vector<LabeledEdge> edges;
  while (edges.size() < m) {
    VertexId i = pick(rng), j = pick(rng);
    if (i == j || !seen.insert({std::min(i, j), std::max(i, j)}).second) continue;
    edges.push_back({i, j, lab(rng)});
  }
  return LabeledGraph::build(n, p, edges);
}

}  // namespace

TEST_CASE("two-label path has the expected counts") {
  const LabeledEdge e[] = {{0, 1, 1}, {1, 2, 2}};
  auto g = LabeledGraph::build(3, 2, e);
  CHECK(g.num_edges() == 2);
  CHECK(g.num_edges(1) == 1);
  CHECK(g.num_edges(2) == 1);
  CHECK(g.num_directed_edges() == 4);
  CHECK(g.degree(1) == 2);
}

TEST_CASE("duplicate pair is rejected regardless of label") {
  const LabeledEdge e[] = {{0, 1, 1}, {0, 1, 2}};
  CHECK_THROWS_WITH_AS(LabeledGraph::build(2, 2, e), doctest::Contains("duplicate pair (0, 1)"),
                       std::invalid_argument);
  const LabeledEdge reversed[] = {{0, 1, 1}, {1, 0, 1}};
  CHECK_THROWS_AS(LabeledGraph::build(2, 1, reversed), std::invalid_argument);
}

TEST_CASE("self-loops, bad labels and bad vertices are rejected") {
  const LabeledEdge loop[] = {{1, 1, 1}};
  CHECK_THROWS_AS(LabeledGraph::build(3, 1, loop), std::invalid_argument);
  const LabeledEdge label0[] = {{0, 1, 0}};
  CHECK_THROWS_AS(LabeledGraph::build(3, 1, label0), std::invalid_argument);
  const LabeledEdge label3[] = {{0, 1, 3}};
  CHECK_THROWS_AS(LabeledGraph::build(3, 2, label3), std::invalid_argument);
  const LabeledEdge far[] = {{0, 5, 1}};
  CHECK_THROWS_AS(LabeledGraph::build(3, 1, far), std::invalid_argument);
}

TEST_CASE("triangle with an isolated vertex") {
  const LabeledEdge e[] = {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}};
  auto g = LabeledGraph::build(4, 1, e);
  CHECK(g.num_directed_edges() == 6);
  CHECK(g.adjacency(3).empty());
  CHECK(g.degree(3) == 0);
  for (VertexId v = 0; v < 3; ++v) CHECK(g.degree(v) == 2);
}

TEST_CASE("reverse edge swaps endpoints") {
  const LabeledEdge e[] = {{0, 1, 1}};
  auto g = LabeledGraph::build(2, 1, e);
  DirectedEdgeId fwd = g.out_edges(0)[0];
  CHECK(g.source(fwd) == 0);
  CHECK(g.target(fwd) == 1);
  DirectedEdgeId back = g.reverse_edge(fwd);
  CHECK(g.source(back) == 1);
  CHECK(g.target(back) == 0);
  CHECK_THROWS_AS(g.reverse_edge(2), std::out_of_range);
}

TEST_CASE("directed index invariants on random graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto g = random_graph(60, 3, 150, seed);
    std::size_t total = 0;
    for (Label a = 1; a <= 3; ++a) total += 2 * g.num_edges(a);
    CHECK(total == g.num_directed_edges());

    std::size_t out_total = 0;
    std::vector<int> hit(g.num_directed_edges(), 0);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      for (DirectedEdgeId e : g.out_edges(v)) {
        CHECK(g.source(e) == v);
        ++hit[e];
        ++out_total;
      }
    }
    CHECK(out_total == g.num_directed_edges());
    CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));

    for (DirectedEdgeId e = 0; e < g.num_directed_edges(); ++e) {
      CHECK(g.reverse_edge(g.reverse_edge(e)) == e);
      CHECK(g.label(e) == g.label(g.reverse_edge(e)));
      CHECK(g.source(e) == g.target(g.reverse_edge(e)));
    }
  }
}

TEST_CASE("adjacency is symmetric with matching labels") {
  auto g = random_graph(40, 2, 100, 99);
  std::set<std::tuple<VertexId, VertexId, Label>> arcs;
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    for (const auto& nb : g.adjacency(v)) arcs.insert({v, nb.vertex, nb.label});
  for (const auto& [i, j, a] : arcs) CHECK(arcs.count({j, i, a}) == 1);
  CHECK(arcs.size() == g.num_directed_edges());
}

TEST_CASE("edge list round trip keeps isolated vertices and labels") {
  const LabeledEdge e[] = {{0, 1, 2}, {3, 1, 1}};
  auto g = LabeledGraph::build(6, 3, e);
  std::stringstream buf;
  write_edge_list(buf, g);
  auto h = read_edge_list(buf);
  CHECK(h.num_vertices() == 6);
  CHECK(h.num_labels() == 3);
  REQUIRE(h.num_edges() == 2);
  CHECK(h.edge(1).i == 3);
  CHECK(h.edge(1).label == 1);
}

TEST_CASE("edge list parser infers sizes and skips comments") {
  std::istringstream in("# a comment\n0\t4\t1\n\n2\t3\t2\n");
  auto g = read_edge_list(in);
  CHECK(g.num_vertices() == 5);
  CHECK(g.num_labels() == 2);
  std::istringstream bad("0\tx\t1\n");
  CHECK_THROWS_AS(read_edge_list(bad), std::invalid_argument);
  std::istringstream zero_label("0\t1\t0\n");
  CHECK_THROWS_AS(read_edge_list(zero_label), std::invalid_argument);
}

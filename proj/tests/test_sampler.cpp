#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lsbm/graph.hpp"
#include "lsbm/params.hpp"
#include "lsbm/sampler.hpp"

using namespace lsbm;

TEST_CASE("affinities at the uniform point") {
  auto d = derive_affinities({2, {3}, {0.5}});
  CHECK(d.per_label[0].c_in == 3.0);
  CHECK(d.per_label[0].c_out == 3.0);
  CHECK(d.per_label[0].delta == 0.0);
}

TEST_CASE("total degree and label fractions") {
  auto d = derive_affinities({2, {3, 5}, {0.2, 0.9}});
  CHECK(d.total_degree == 8.0);
  CHECK(d.fraction[0] == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(d.fraction[1] == doctest::Approx(5.0 / 8.0).epsilon(1e-15));
}

TEST_CASE("pure assortative extreme") {
  auto d = derive_affinities({2, {2}, {1.0}});
  CHECK(d.per_label[0].c_in == 4.0);
  CHECK(d.per_label[0].c_out == 0.0);
}

TEST_CASE("strength round trips through the affinities") {
  for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    for (double c : {0.5, 3.0, 11.0}) {
      auto d = derive_affinities({2, {c}, {x}});
      const auto& la = d.per_label[0];
      CHECK(std::abs(strength_from_affinity(la.c_in, la.c_out) - x) < 1e-15);
      CHECK(std::abs(strength_from_delta(la.delta, c) - x) < 1e-15);
      CHECK(std::abs((la.c_in + la.c_out) / 2 - c) < 1e-14);
    }
  }
}

TEST_CASE("invalid ensemble parameters are rejected") {
  CHECK_THROWS_AS(derive_affinities({2, {0.0}, {0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(derive_affinities({2, {3}, {1.2}}), std::invalid_argument);
  CHECK_THROWS_AS(derive_affinities({2, {3}, {-0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(derive_affinities({2, {3, 4}, {0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(derive_affinities({3, {3}, {0.5}}), std::invalid_argument);
}

TEST_CASE("density beyond N names the label") {
  CHECK_THROWS_WITH_AS(sample_instance({2, {1, 6}, {0.5, 0.9}}, 10, 1),
                       doctest::Contains("label 2"), std::invalid_argument);
  CHECK_THROWS_AS(sample_instance({2, {1}, {0.5}}, 1, 1), std::invalid_argument);
}

TEST_CASE("exhaustive sampler matches pair-label probabilities on N=4") {
  // Frequency oracle: each same-module pair carries label 1 with probability
  // c_in / N and each cross pair with c_out / N.
  const EnsembleParams p{2, {1.0}, {0.75}};
  const double n = 4.0;
  const double p_in = 2 * 1.0 * 0.75 / n, p_out = 2 * 1.0 * 0.25 / n;
  SamplerOptions opt;
  opt.pairs = PairSampler::Exhaustive;
  const std::size_t samples = 1'000'000;
  std::size_t in_pairs = 0, in_edges = 0, out_pairs = 0, out_edges = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    auto inst = sample_instance(p, 4, s + 1, opt);
    const auto& sigma = inst.planted;
    std::size_t same = 0;
    for (VertexId i = 0; i < 4; ++i)
      for (VertexId j = i + 1; j < 4; ++j) same += sigma[i] == sigma[j];
    in_pairs += same;
    out_pairs += 6 - same;
    for (const auto& e : inst.graph.edges()) {
      if (sigma[e.i] == sigma[e.j]) ++in_edges;
      else ++out_edges;
    }
  }
  // balanced assignment on four vertices: two same-module pairs per sample
  CHECK(in_pairs == 2 * samples);
  const double f_in = static_cast<double>(in_edges) / static_cast<double>(in_pairs);
  const double f_out = static_cast<double>(out_edges) / static_cast<double>(out_pairs);
  const double se_in = std::sqrt(p_in * (1 - p_in) / static_cast<double>(in_pairs));
  const double se_out = std::sqrt(p_out * (1 - p_out) / static_cast<double>(out_pairs));
  CHECK(std::abs(f_in - p_in) < 4 * se_in);
  CHECK(std::abs(f_out - p_out) < 4 * se_out);
}

TEST_CASE("same seed gives a byte-identical instance") {
  const EnsembleParams p{2, {3, 5}, {0.2, 0.7}};
  auto a = sample_instance(p, 3000, 42);
  auto b = sample_instance(p, 3000, 42);
  auto c = sample_instance(p, 3000, 43);
  std::ostringstream sa, sb, sc;
  write_edge_list(sa, a.graph);
  write_edge_list(sb, b.graph);
  write_edge_list(sc, c.graph);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() != sc.str());
  CHECK(a.planted == b.planted);
}

TEST_CASE("x = 1 produces only within-module edges") {
  auto inst = sample_instance({2, {4, 2}, {1.0, 0.5}}, 5000, 3);
  REQUIRE(inst.graph.num_edges(1) > 0);
  for (EdgeId k : inst.graph.edges_with_label(1)) {
    const auto& e = inst.graph.edge(k);
    CHECK(inst.planted[e.i] == inst.planted[e.j]);
  }
}

TEST_CASE("balanced and iid assignments") {
  const EnsembleParams p{2, {3}, {0.5}};
  auto bal = sample_instance(p, 1001, 5);
  std::size_t ones = 0;
  for (auto s : bal.planted) ones += s;
  CHECK(ones == 501);

  SamplerOptions iid;
  iid.assignment = AssignmentMode::Iid;
  auto r = sample_instance(p, 10000, 5, iid);
  ones = 0;
  for (auto s : r.planted) ones += s;
  CHECK(std::abs(static_cast<double>(ones) - 5000.0) < 4 * 50.0);
}

TEST_CASE("mean degree concentrates at N = 10^4") {
  const std::size_t n = 10000;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    auto inst = sample_instance({2, {3, 5}, {0.5, 0.5}}, n, seed);
    // L_alpha is Poisson-like with mean N c_alpha / 2
    for (Label a = 1; a <= 2; ++a) {
      const double c = a == 1 ? 3.0 : 5.0;
      const double mean = n * c / 2;
      CHECK(std::abs(static_cast<double>(inst.graph.num_edges(a)) - mean) < 3 * std::sqrt(mean));
    }
    const double deg = 2.0 * static_cast<double>(inst.graph.num_edges()) / n;
    CHECK(std::abs(deg - 8.0) < 3 * 2 * std::sqrt(n * 4.0) / n);
  }
}

TEST_CASE("blockwise sampler reproduces in and out edge densities") {
  const std::size_t n = 20000;
  auto inst = sample_instance({2, {4}, {0.8}}, n, 77);
  std::size_t in = 0;
  for (const auto& e : inst.graph.edges()) in += inst.planted[e.i] == inst.planted[e.j];
  const double out = static_cast<double>(inst.graph.num_edges() - in);
  // expected counts: c_in N / 4 within and c_out N / 4 across (to O(1))
  const double e_in = 6.4 * n / 4, e_out = 1.6 * n / 4;
  CHECK(std::abs(static_cast<double>(in) - e_in) < 4 * std::sqrt(e_in));
  CHECK(std::abs(out - e_out) < 4 * std::sqrt(e_out));
}

TEST_CASE("assignment file round trip") {
  std::vector<Module> a = {0, 1, 1, 0, 1};
  std::stringstream buf;
  write_assignment(buf, a);
  CHECK(buf.str().substr(0, 4) == "0\t1\n");
  CHECK(read_assignment(buf) == a);
  std::istringstream bad("0\t3\n");
  CHECK_THROWS_AS(read_assignment(bad), std::invalid_argument);
}

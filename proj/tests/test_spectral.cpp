#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "lsbm/phase.hpp"
#include "lsbm/sampler.hpp"
#include "lsbm/spectral.hpp"

using namespace lsbm;

namespace {

// Entry rule written directly from the definition.
Eigen::MatrixXd rule_matrix(const LabeledGraph& g, const EstimatedAffinities& est) {
  const std::size_t m = g.num_directed_edges();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  for (DirectedEdgeId row = 0; row < m; ++row)
    for (DirectedEdgeId col = 0; col < m; ++col)
      if (g.target(col) == g.source(row) && g.source(col) != g.target(row))
        b(row, col) = est.delta(g.label(col) - 1) / (2.0 * est.mean_degree[g.label(col) - 1]);
  return b;
}

std::vector<double> deltas(const EnsembleParams& p) {
  std::vector<double> out;
  for (const auto& la : derive_affinities(p).per_label) out.push_back(la.delta);
  return out;
}

EnsembleParams random_params(Rng& rng, std::size_t labels) {
  std::uniform_real_distribution<double> deg(0.2, 10.0), str(0.0, 1.0);
  EnsembleParams p;
  for (std::size_t a = 0; a < labels; ++a) {
    p.mean_degree.push_back(deg(rng));
    p.strength.push_back(str(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("triangle operator matches hand enumeration") {
  const LabeledEdge e[] = {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}};
  auto g = LabeledGraph::build(3, 1, e);
  EstimatedAffinities est{{2.0}, {0.8}};
  const double w = est.delta(0) / (2 * 2.0);
  CHECK(w == doctest::Approx(0.6));
  NbOperator op(g, est);
  auto dense = op.dense();
  REQUIRE(dense.rows() == 6);
  CHECK((dense - rule_matrix(g, est)).cwiseAbs().maxCoeff() == 0.0);
  // each directed edge has exactly one non-backtracking predecessor on a triangle
  for (int r = 0; r < 6; ++r) {
    int nz = 0;
    for (int c = 0; c < 6; ++c) nz += dense(r, c) != 0.0;
    CHECK(nz == 1);
  }
  // two directed 3-cycles: eigenvalues w * cube roots of unity, each twice
  auto ev = dense_eigenvalues(dense);
  REQUIRE(ev.size() == 6);
  for (const auto& z : ev) {
    CHECK(std::abs(std::abs(z) - w) < 1e-12);
    CHECK(std::abs(std::pow(z / w, 3) - 1.0) < 1e-10);
  }
  const auto real_count = std::count_if(ev.begin(), ev.end(), [](auto z) {
    return std::abs(z.imag()) < 1e-12;
  });
  CHECK(real_count == 2);
}

TEST_CASE("apply agrees with the dense matrix") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto inst = sample_instance({2, {2, 1.5}, {0.8, 0.3}}, 250, seed);
    REQUIRE(inst.graph.num_directed_edges() <= 2000);
    auto est = EstimatedAffinities::from_graph(inst.graph, {0.77, 0.2});
    NbOperator op(inst.graph, est);
    auto dense = op.dense();
    CHECK((dense - rule_matrix(inst.graph, est)).cwiseAbs().maxCoeff() == 0.0);
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd x(op.dimension());
    for (auto& v : x) v = gauss(rng);
    const Eigen::VectorXd y1 = op.apply(x);
    const Eigen::VectorXd y2 = dense * x;
    CHECK((y1 - y2).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("uninformative estimates give the zero operator") {
  auto inst = sample_instance({2, {3, 5}, {0.2, 0.7}}, 150, 2);
  auto est = EstimatedAffinities::from_graph(inst.graph, {0.5, 0.5});
  NbOperator op(inst.graph, est);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(op.dimension());
  CHECK(op.apply(x).cwiseAbs().maxCoeff() == 0.0);
  auto s = empirical_spectrum(op, est);
  for (const auto& z : s.eigenvalues) CHECK(std::abs(z) == 0.0);
  CHECK(s.band_radius_analytic == 0.0);
}

TEST_CASE("operator construction errors") {
  auto inst = sample_instance({2, {3, 5}, {0.2, 0.7}}, 100, 2);
  EstimatedAffinities short_est{{3.0}, {0.2}};
  CHECK_THROWS_AS(NbOperator(inst.graph, short_est), std::invalid_argument);
  auto est = EstimatedAffinities::from_graph(inst.graph, {0.2, 0.7});
  CHECK_THROWS_AS(NbOperator(inst.graph, est, 3), std::invalid_argument);
  auto big = sample_instance({2, {3, 5}, {0.2, 0.7}}, 2000, 2);
  NbOperator large(big.graph, EstimatedAffinities::from_graph(big.graph, {0.2, 0.7}));
  CHECK_THROWS_AS(large.dense(), std::length_error);
}

TEST_CASE("band radius closed-form examples") {
  const std::vector<double> c = {3, 5};
  CHECK(band_radius(c, std::vector<double>{0, 0}) == 0.0);
  const double d = 1.0 / (2 * std::sqrt(8.0));
  const std::vector<double> dh = {delta_from_strength(0.5 - d, 3), delta_from_strength(0.5 + d, 5)};
  CHECK(std::abs(band_radius(c, dh) - 1.0) < 1e-12);
  const std::vector<double> one = {4.0};
  CHECK(std::abs(band_radius(one, std::vector<double>{2 * std::sqrt(4.0)}) - 1.0) < 1e-15);
  CHECK_THROWS_AS(band_radius(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("isolated eigenvalue is bilinear and matches the transfer matrix") {
  Rng rng = make_rng(77);
  for (int t = 0; t < 1000; ++t) {
    auto planted = random_params(rng, 1 + t % 4);
    auto est = random_params(rng, planted.num_labels());
    est.mean_degree = planted.mean_degree;
    const auto dc = deltas(planted), dh = deltas(est);
    const double iso = iso_eigenvalue(dc, dh, planted.mean_degree);
    const double via_j =
        iso_eigenvalue_from_transfer(averaged_transfer_matrix(dc, dh, planted.mean_degree));
    CHECK(std::abs(iso - via_j) < 1e-12 * std::max(1.0, std::abs(iso)));

    std::vector<double> twice = dh, flipped = dh;
    for (auto& v : twice) v *= 2;
    for (auto& v : flipped) v = -v;
    CHECK(std::abs(iso_eigenvalue(dc, twice, planted.mean_degree) - 2 * iso) < 1e-12);
    CHECK(iso_eigenvalue(dc, flipped, planted.mean_degree) == doctest::Approx(-iso));
  }
  CHECK(iso_eigenvalue(std::vector<double>{1, 2}, std::vector<double>{0, 0},
                       std::vector<double>{3, 5}) == 0.0);
}

TEST_CASE("closed forms are invariant under relabeling edge types") {
  Rng rng = make_rng(3);
  for (int t = 0; t < 200; ++t) {
    auto p = random_params(rng, 3);
    auto q = p;
    std::swap(q.mean_degree[0], q.mean_degree[2]);
    std::swap(q.strength[0], q.strength[2]);
    CHECK(band_radius(p.mean_degree, deltas(p)) ==
          doctest::Approx(band_radius(q.mean_degree, deltas(q))).epsilon(1e-14));
    CHECK(iso_eigenvalue(deltas(p), deltas(p), p.mean_degree) ==
          doctest::Approx(iso_eigenvalue(deltas(q), deltas(q), q.mean_degree)).epsilon(1e-14));
    CHECK(known_param_threshold(p).lhs ==
          doctest::Approx(known_param_threshold(q).lhs).epsilon(1e-14));
  }
}

TEST_CASE("band radius equals the known-parameter ratio at the planted values") {
  Rng rng = make_rng(11);
  for (int t = 0; t < 1000; ++t) {
    auto p = random_params(rng, 1 + t % 3);
    const auto k = known_param_threshold(p);
    CHECK(std::abs(band_radius(p.mean_degree, deltas(p)) - k.lhs / k.rhs) < 1e-12);
  }
}

TEST_CASE("spectrum classification separates an isolated real eigenvalue") {
  SpectralSummary s;
  s.band_radius_analytic = 1.0;
  s.eigenvalues = {{2.0, 0.0}, {0.9, 0.4}, {-1.02, 0.0}, {0.3, 0.0}};
  classify_spectrum(s, 0.05);
  REQUIRE(s.isolated.size() == 1);
  CHECK(s.isolated[0] == 2.0);
  REQUIRE(s.empirical_leading_real.has_value());
  CHECK(*s.empirical_leading_real == 2.0);
  CHECK(s.empirical_band_radius == doctest::Approx(1.02));
}

TEST_CASE("Krylov eigenvalues agree with the dense solver on the leading part") {
  auto inst = sample_instance({2, {3, 5}, {0.1, 0.6}}, 300, 4);
  auto est = EstimatedAffinities::from_graph(inst.graph, {0.1, 0.6});
  NbOperator op(inst.graph, est);
  auto dense = dense_eigenvalues(op.dense());
  std::sort(dense.begin(), dense.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  auto kr = arnoldi_eigenvalues(op, 4, 80, 200, 1e-10, 5);
  CHECK(kr.converged);
  REQUIRE(kr.eigenvalues.size() >= 1);
  CHECK(std::abs(std::abs(kr.eigenvalues[0]) - std::abs(dense[0])) < 1e-6);
}

TEST_CASE("spectrum CSV lists every eigenvalue") {
  SpectralSummary s;
  s.eigenvalues = {{1.0, 0.5}, {1.0, -0.5}};
  std::ostringstream out;
  write_spectrum_csv(out, s);
  CHECK(out.str().rfind("re,im\n1,0.5\n", 0) == 0);
}

#include "lsbm/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lsbm/random.hpp"

namespace lsbm {

NbOperator::NbOperator(const LabeledGraph& graph, const EstimatedAffinities& estimates, int q)
    : graph_(&graph) {
  if (q != 2) throw std::invalid_argument("only q = 2 is supported");
  if (estimates.num_labels() < graph.num_labels())
    throw std::invalid_argument("estimates missing for label " +
                                std::to_string(estimates.num_labels() + 1));
  weights_.resize(graph.num_labels());
  for (std::size_t a = 0; a < graph.num_labels(); ++a) {
    const double c = estimates.mean_degree[a];
    const double d = estimates.delta(a);
    weights_[a] = (d == 0.0) ? 0.0 : d / (q * c);
  }
}

void NbOperator::apply(std::span<const double> x, std::span<double> y) const {
  const auto& g = *graph_;
  if (x.size() != dimension() || y.size() != dimension())
    throw std::invalid_argument("vector size does not match operator dimension");
  for (VertexId i = 0; i < g.num_vertices(); ++i) {
    const auto out = g.out_edges(i);
    double total = 0.0;
    for (DirectedEdgeId e : out) {
      const DirectedEdgeId in = e ^ 1u;
      total += weights_[g.label(in) - 1] * x[in];
    }
    // drop the backtracking term i'->i when producing i->i'
    for (DirectedEdgeId e : out) {
      const DirectedEdgeId in = e ^ 1u;
      y[e] = total - weights_[g.label(in) - 1] * x[in];
    }
  }
}

Eigen::VectorXd NbOperator::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  apply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
        std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

Eigen::MatrixXd NbOperator::dense() const {
  const std::size_t n = dimension();
  if (n > kMaxDenseDimension)
    throw std::length_error("dense non-backtracking matrix limited to dimension " +
                            std::to_string(kMaxDenseDimension));
  const auto& g = *graph_;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (DirectedEdgeId row = 0; row < n; ++row) {
    const VertexId i = g.source(row), i_next = g.target(row);
    for (DirectedEdgeId e : g.out_edges(i)) {
      const DirectedEdgeId col = e ^ 1u;  // j->i
      if (g.source(col) == i_next) continue;
      m(row, col) = weights_[g.label(col) - 1];
    }
  }
  return m;
}

namespace {

void check_degrees(std::span<const double> mean_degree, std::span<const double> a,
                   std::span<const double> b = {}) {
  if (a.size() != mean_degree.size() || (!b.empty() && b.size() != mean_degree.size()))
    throw std::invalid_argument("need one entry per label");
  for (std::size_t k = 0; k < mean_degree.size(); ++k) {
    if (mean_degree[k] < 0.0 || !std::isfinite(mean_degree[k]))
      throw std::invalid_argument("mean degree of label " + std::to_string(k + 1) +
                                  " must be non-negative");
    const bool active = a[k] != 0.0 || (!b.empty() && b[k] != 0.0);
    if (mean_degree[k] == 0.0 && active)
      throw std::invalid_argument("label " + std::to_string(k + 1) +
                                  " has zero degree but nonzero structure");
  }
}

}  // namespace

double band_radius(std::span<const double> mean_degree, std::span<const double> delta_hat) {
  check_degrees(mean_degree, delta_hat);
  double c = 0.0;
  for (double x : mean_degree) c += x;
  if (!(c > 0.0)) throw std::invalid_argument("total degree must be positive");
  double acc = 0.0;
  for (std::size_t a = 0; a < mean_degree.size(); ++a) {
    if (delta_hat[a] == 0.0) continue;
    const double frac = mean_degree[a] / c;
    acc += delta_hat[a] * delta_hat[a] / frac;
  }
  return std::sqrt(acc) / (2.0 * std::sqrt(c));
}

double iso_eigenvalue(std::span<const double> delta, std::span<const double> delta_hat,
                      std::span<const double> mean_degree) {
  check_degrees(mean_degree, delta, delta_hat);
  double acc = 0.0;
  for (std::size_t a = 0; a < mean_degree.size(); ++a) {
    if (delta[a] == 0.0 || delta_hat[a] == 0.0) continue;
    acc += (delta[a] / (2.0 * std::sqrt(mean_degree[a]))) *
           (delta_hat[a] / (2.0 * std::sqrt(mean_degree[a])));
  }
  return acc;
}

Eigen::Matrix2d averaged_transfer_matrix(std::span<const double> delta,
                                         std::span<const double> delta_hat,
                                         std::span<const double> mean_degree, int q) {
  check_degrees(mean_degree, delta, delta_hat);
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  for (std::size_t a = 0; a < mean_degree.size(); ++a) {
    if (mean_degree[a] == 0.0) continue;
    const double w = delta_hat[a] / (q * mean_degree[a]);
    const double c_in = mean_degree[a] + delta[a] / 2.0;
    const double c_out = mean_degree[a] - delta[a] / 2.0;
    j(0, 0) += c_in * w / q;
    j(1, 1) += c_in * w / q;
    j(0, 1) += c_out * w / q;
    j(1, 0) += c_out * w / q;
  }
  return j;
}

double iso_eigenvalue_from_transfer(const Eigen::Matrix2d& transfer) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(transfer);
  const auto& vecs = solver.eigenvectors();
  // the module-antisymmetric mode has components of opposite sign
  for (int k = 0; k < 2; ++k)
    if (vecs(0, k) * vecs(1, k) < 0.0) return solver.eigenvalues()(k);
  // degenerate spectrum (J proportional to identity): any vector is an eigenvector
  return solver.eigenvalues()(0);
}

std::vector<std::complex<double>> dense_eigenvalues(Eigen::MatrixXd matrix) {
  const lapack_int n = static_cast<lapack_int>(matrix.rows());
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("matrix must be square");
  if (n == 0) return {};
  std::vector<double> wr(n), wi(n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, matrix.data(), n,
                                        wr.data(), wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("dgeev failed with info " + std::to_string(info));
  std::vector<std::complex<double>> out(n);
  for (lapack_int k = 0; k < n; ++k) out[k] = {wr[k], wi[k]};
  return out;
}

ArnoldiResult arnoldi_eigenvalues(const NbOperator& op, std::size_t k, std::size_t subspace,
                                  std::size_t max_restarts, double tol, std::uint64_t seed) {
  const Eigen::Index n = static_cast<Eigen::Index>(op.dimension());
  ArnoldiResult result;
  if (n == 0) {
    result.converged = true;
    return result;
  }
  k = std::min<std::size_t>(std::max<std::size_t>(k, 1), static_cast<std::size_t>(n));
  Eigen::Index m = static_cast<Eigen::Index>(subspace == 0 ? std::max<std::size_t>(4 * k, 60)
                                                           : subspace);
  m = std::min(m, n);

  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = gauss(rng);

  for (std::size_t restart = 0; restart <= max_restarts; ++restart) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, m + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    v.col(0) = start.normalized();
    Eigen::Index used = m;
    bool breakdown = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::VectorXd w = op.apply(Eigen::VectorXd(v.col(j)));
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd proj = v.leftCols(j + 1).transpose() * w;
        w -= v.leftCols(j + 1) * proj;
        h.col(j).head(j + 1) += proj;
      }
      const double norm = w.norm();
      h(j + 1, j) = norm;
      if (norm <= 1e-13 * std::max(1.0, h.col(j).head(j + 1).norm())) {
        used = j + 1;
        breakdown = true;
        break;
      }
      v.col(j + 1) = w / norm;
    }

    Eigen::EigenSolver<Eigen::MatrixXd> solver(h.topLeftCorner(used, used));
    const auto vals = solver.eigenvalues();
    const auto vecs = solver.eigenvectors();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(used));
    for (Eigen::Index i = 0; i < used; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return std::abs(vals(a)) > std::abs(vals(b)); });

    const std::size_t want = std::min<std::size_t>(k, order.size());
    const double beta = breakdown ? 0.0 : h(used, used - 1);
    bool all_ok = true;
    result.eigenvalues.clear();
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
    for (std::size_t r = 0; r < want; ++r) {
      const Eigen::Index idx = order[r];
      const std::complex<double> theta = vals(idx);
      result.eigenvalues.push_back(theta);
      const Eigen::VectorXcd y = vecs.col(idx).normalized();
      const double residual = beta * std::abs(y(used - 1));
      if (residual > tol * std::max(1.0, std::abs(theta))) all_ok = false;
      const Eigen::VectorXcd ritz = v.leftCols(used) * y;
      next += ritz.real() + ritz.imag();
    }
    if (all_ok || breakdown) {
      result.converged = true;
      return result;
    }
    if (next.norm() == 0.0) break;
    start = next;
  }
  result.converged = false;
  return result;
}

void classify_spectrum(SpectralSummary& s, double isolation_margin) {
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(),
            [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
  double scale = 1.0;
  if (!s.eigenvalues.empty()) scale = std::max(1.0, std::abs(s.eigenvalues.front()));
  const double threshold = (1.0 + isolation_margin) * s.band_radius_analytic;
  s.isolated.clear();
  s.empirical_band_radius = 0.0;
  s.empirical_leading_real.reset();
  for (const auto& z : s.eigenvalues) {
    const double mag = std::abs(z);
    const bool real = std::abs(z.imag()) < 1e-8 * scale;
    if (real && mag > 1e-12 * scale && mag >= threshold) {
      s.isolated.push_back(z.real());
      if (!s.empirical_leading_real) s.empirical_leading_real = z.real();
    } else {
      s.empirical_band_radius = std::max(s.empirical_band_radius, mag);
    }
  }
}

SpectralSummary empirical_spectrum(const NbOperator& op, const EstimatedAffinities& estimates,
                                   const SpectrumOptions& options,
                                   std::span<const double> planted_delta) {
  SpectralSummary s;
  std::vector<double> delta_hat(estimates.num_labels());
  for (std::size_t a = 0; a < delta_hat.size(); ++a) delta_hat[a] = estimates.delta(a);
  s.band_radius_analytic = band_radius(estimates.mean_degree, delta_hat);
  if (!planted_delta.empty())
    s.iso_analytic = iso_eigenvalue(planted_delta, delta_hat, estimates.mean_degree);

  if (options.mode == SpectrumMode::Dense) {
    s.eigenvalues = dense_eigenvalues(op.dense());
  } else {
    auto r = arnoldi_eigenvalues(op, options.num_eigenvalues, options.subspace,
                                 options.max_restarts, options.tol, options.seed);
    s.eigenvalues = std::move(r.eigenvalues);
    s.converged = r.converged;
  }
  classify_spectrum(s, options.isolation_margin);
  return s;
}

void write_spectrum_csv(std::ostream& out, const SpectralSummary& summary) {
  out << "re,im\n" << std::setprecision(17);
  for (const auto& z : summary.eigenvalues) out << z.real() << ',' << z.imag() << '\n';
}

void write_spectrum_json(std::ostream& out, const SpectralSummary& summary) {
  nlohmann::json j;
  j["band_radius_analytic"] = summary.band_radius_analytic;
  j["iso_analytic"] = summary.iso_analytic ? nlohmann::json(*summary.iso_analytic) : nullptr;
  j["empirical_band_radius"] = summary.empirical_band_radius;
  j["empirical_leading_real"] =
      summary.empirical_leading_real ? nlohmann::json(*summary.empirical_leading_real) : nullptr;
  j["isolated"] = summary.isolated;
  j["num_eigenvalues"] = summary.eigenvalues.size();
  j["converged"] = summary.converged;
  out << j.dump(2) << '\n';
}

}  // namespace lsbm

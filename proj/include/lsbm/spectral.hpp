#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "lsbm/bp.hpp"
#include "lsbm/graph.hpp"

namespace lsbm {

/// Weighted non-backtracking operator on directed edges:
///   B'[i->i', j->j'] = w_{label(j->j')}  iff  j' = i and j != i',
/// with w_alpha = delta_hat_alpha / (q c_alpha).
class NbOperator {
 public:
  static constexpr std::size_t kMaxDenseDimension = 6000;

  NbOperator(const LabeledGraph& graph, const EstimatedAffinities& estimates, int q = 2);

  std::size_t dimension() const { return graph_->num_directed_edges(); }
  double weight(Label label) const { return weights_[label - 1]; }
  const LabeledGraph& graph() const { return *graph_; }

  /// y = B' x in O(L).
  void apply(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /// Throws std::length_error when dimension() > kMaxDenseDimension.
  Eigen::MatrixXd dense() const;

 private:
  const LabeledGraph* graph_;
  std::vector<double> weights_;
};

/// |lambda_b| = sqrt(sum_alpha delta_hat_alpha^2 / P_alpha) / (2 sqrt(c)).
/// Throws std::invalid_argument for a non-positive degree or mismatched sizes.
double band_radius(std::span<const double> mean_degree, std::span<const double> delta_hat);

/// lambda_iso = sum_alpha delta_alpha delta_hat_alpha / (4 c_alpha).
double iso_eigenvalue(std::span<const double> delta, std::span<const double> delta_hat,
                      std::span<const double> mean_degree);

/// J[s][s'] = (1/q) sum_alpha c^alpha_{s s'} delta_hat_alpha / (q c_alpha) for
/// the planted affinities implied by (delta, mean_degree).
Eigen::Matrix2d averaged_transfer_matrix(std::span<const double> delta,
                                         std::span<const double> delta_hat,
                                         std::span<const double> mean_degree, int q = 2);

/// Eigenvalue of the transfer matrix whose eigenvector is antisymmetric
/// across modules, found with a 2x2 symmetric eigensolver.
double iso_eigenvalue_from_transfer(const Eigen::Matrix2d& transfer);

enum class SpectrumMode { Dense, Krylov };

struct SpectrumOptions {
  SpectrumMode mode = SpectrumMode::Dense;
  std::size_t num_eigenvalues = 6;   // Krylov only
  std::size_t subspace = 0;          // Krylov basis size; 0 picks max(4k, 60)
  std::size_t max_restarts = 60;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  double isolation_margin = 0.05;    // isolated iff real and |lambda| >= (1 + margin) lambda_b
};

struct SpectralSummary {
  double band_radius_analytic = 0.0;
  std::optional<double> iso_analytic;
  std::vector<std::complex<double>> eigenvalues;  // sorted by decreasing magnitude
  double empirical_band_radius = 0.0;
  std::optional<double> empirical_leading_real;
  std::vector<double> isolated;                   // isolated real eigenvalues
  bool converged = true;
};

/// Splits a set of eigenvalues into bulk and isolated parts relative to an
/// analytic band radius; fills the empirical fields of `summary`.
void classify_spectrum(SpectralSummary& summary, double isolation_margin);

/// Analytic values use the operator's estimates with mean degrees taken from
/// the estimates; `planted_delta`, when given, enables iso_analytic.
SpectralSummary empirical_spectrum(const NbOperator& op, const EstimatedAffinities& estimates,
                                   const SpectrumOptions& options = {},
                                   std::span<const double> planted_delta = {});

/// Largest-magnitude eigenvalues by explicitly restarted Arnoldi.
struct ArnoldiResult {
  std::vector<std::complex<double>> eigenvalues;
  bool converged = false;
};
ArnoldiResult arnoldi_eigenvalues(const NbOperator& op, std::size_t k, std::size_t subspace,
                                  std::size_t max_restarts, double tol, std::uint64_t seed);

/// All eigenvalues of a general real square matrix (LAPACK dgeev).
std::vector<std::complex<double>> dense_eigenvalues(Eigen::MatrixXd matrix);

void write_spectrum_csv(std::ostream& out, const SpectralSummary& summary);
void write_spectrum_json(std::ostream& out, const SpectralSummary& summary);

}  // namespace lsbm

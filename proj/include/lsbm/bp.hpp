#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lsbm/graph.hpp"
#include "lsbm/params.hpp"
#include "lsbm/random.hpp"
#include "lsbm/sampler.hpp"

namespace lsbm {

using Belief = std::array<double, 2>;

/// Current parameter estimates. Mean degrees stay fixed at their empirical
/// values; only the strengths x_hat are learned.
struct EstimatedAffinities {
  std::vector<double> mean_degree;
  std::vector<double> strength;

  std::size_t num_labels() const { return mean_degree.size(); }
  double c_in(std::size_t a) const { return 2.0 * mean_degree[a] * strength[a]; }
  double c_out(std::size_t a) const { return 2.0 * mean_degree[a] * (1.0 - strength[a]); }
  double delta(std::size_t a) const { return delta_from_strength(strength[a], mean_degree[a]); }

  /// c_alpha = 2 L_alpha / N from the graph.
  static EstimatedAffinities from_graph(const LabeledGraph& graph, std::vector<double> strength);
  static EstimatedAffinities from_params(const EnsembleParams& params);
};

enum class MessageInit { UniformRandom, Factorized, PlantedBiased };

struct MessageState {
  std::vector<Belief> cavity;     // by directed edge id: cavity[i->j] = psi^{i->j}
  std::vector<Belief> marginals;  // by vertex
  Belief module_mass{};           // sum over vertices of the marginals
  Belief field{};                 // h_sigma, the non-edge term
  std::size_t iteration_count = 0;
  double last_max_delta = 0.0;
  std::size_t underflow_count = 0;
  Rng schedule;                   // drives the per-sweep update order
};

struct BpConfig {
  double tol = 1e-6;
  std::size_t max_sweeps = 200;
  double damping = 0.0;         // new = (1 - damping) * update + damping * old
  bool external_field = true;   // include the mean-field non-edge term
};

struct BpResult {
  std::size_t sweeps = 0;
  bool converged = false;
  double max_delta = 0.0;
};

/// `bias` and `planted` are only used by PlantedBiased, which sets every
/// message of vertex i to (1/2 + bias, 1/2 - bias) rotated toward planted[i].
/// Marginals start at (1/2, 1/2).
MessageState init_messages(const LabeledGraph& graph, std::uint64_t seed, MessageInit mode,
                           double bias = 0.0, std::span<const Module> planted = {});

/// One asynchronous sweep: vertices are visited in a fresh random order and
/// all outgoing messages of the visited vertex are recomputed together.
void bp_sweep(const LabeledGraph& graph, const EstimatedAffinities& estimates,
              MessageState& state, const BpConfig& config = {});

/// Sweeps until last_max_delta < tol or max_sweeps; recomputes all complete
/// marginals on exit.
BpResult run_bp(const LabeledGraph& graph, const EstimatedAffinities& estimates,
                MessageState& state, const BpConfig& config = {});

void update_marginals(const LabeledGraph& graph, const EstimatedAffinities& estimates,
                      MessageState& state, const BpConfig& config = {});

/// X^{ij} = sum_sigma psi^{i->j}_sigma psi^{j->i}_sigma, grouped by label
/// (outer index alpha - 1, inner order follows edges_with_label).
std::vector<std::vector<double>> edge_correlators(const LabeledGraph& graph,
                                                  const MessageState& state);

inline double edge_correlator(const MessageState& state, EdgeId k) {
  const Belief& a = state.cavity[2 * k];
  const Belief& b = state.cavity[2 * k + 1];
  return a[0] * b[0] + a[1] * b[1];
}

}  // namespace lsbm

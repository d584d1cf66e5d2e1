#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lsbm/bp.hpp"
#include "lsbm/graph.hpp"

namespace lsbm {

struct EmConfig {
  double tol = 1e-6;                 // on max_alpha |x_hat(t+1) - x_hat(t)|
  std::size_t max_steps = 300;
  BpConfig bp;
  /// 0: run BP to convergence before every M-step (classical EM).
  /// k > 0: M-step after every k BP sweeps.
  std::size_t sweeps_per_m_step = 0;
  double clamp = 1e-4;               // x_hat kept in [clamp, 1 - clamp]
  /// Terminate with BpDiverged after this many consecutive unconverged
  /// E-steps; 0 disables the check. Non-finite messages always terminate.
  std::size_t max_unconverged_streak = 0;
};

enum class EmTermination { EstimatesConverged, MaxEmSteps, BpDiverged };

const char* to_string(EmTermination t);

struct EStepRecord {
  std::size_t sweeps = 0;
  bool converged = false;
  double max_delta = 0.0;
};

struct EmTrajectory {
  /// estimates_history[0] is the initial estimate; entry t+1 follows M-step t.
  std::vector<std::vector<double>> estimates_history;
  std::vector<EStepRecord> bp_history;  // one per M-step
  std::vector<Belief> final_marginals;
  EstimatedAffinities final_estimates;
  EmTermination termination = EmTermination::MaxEmSteps;
  std::vector<bool> frozen_labels;      // labels with no edges are never updated
};

/// One application of the strength update
///   x' = x * < (1 + 2(X - 1/2)) / (1 + 4(x - 1/2)(X - 1/2)) >_{E_alpha}
/// for a single label, without clamping.
double m_step_strength(double strength, std::span<const double> correlators);

/// M-step for every label, clamped into [clamp, 1 - clamp]. Labels without
/// edges keep their estimate and are flagged in `frozen` when supplied.
EstimatedAffinities m_step(const LabeledGraph& graph, const MessageState& state,
                           const EstimatedAffinities& current, double clamp = 1e-4,
                           std::vector<bool>* frozen = nullptr);

/// Alternates E-steps (BP) and M-steps from `init`. Messages are initialized
/// once with (seed, init_mode) and carried across E-steps.
EmTrajectory run_em(const LabeledGraph& graph, const EstimatedAffinities& init,
                    MessageInit init_mode, std::uint64_t seed, const EmConfig& config = {});

/// Per label, the ratios |x(t+1) - 1/2| / |x(t) - 1/2| along the trajectory.
/// Steps where |x(t) - 1/2| is zero report 1.
std::vector<std::vector<double>> transient_attraction_rate(const EmTrajectory& trajectory);

/// CSV columns: step, x_hat_1..x_hat_p, bp_sweeps, bp_delta (row 0 is the
/// initial estimate with zero BP columns).
void write_trajectory_csv(std::ostream& out, const EmTrajectory& trajectory);

}  // namespace lsbm

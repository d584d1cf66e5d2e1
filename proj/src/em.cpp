#include "lsbm/em.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace lsbm {

const char* to_string(EmTermination t) {
  switch (t) {
    case EmTermination::EstimatesConverged: return "estimates-converged";
    case EmTermination::MaxEmSteps: return "max-em-steps";
    case EmTermination::BpDiverged: return "bp-diverged";
  }
  return "unknown";
}

double m_step_strength(double strength, std::span<const double> correlators) {
  if (correlators.empty()) return strength;
  const double d = strength - 0.5;
  double acc = 0.0;
  for (double x : correlators) {
    const double dx = x - 0.5;
    acc += (1.0 + 2.0 * dx) / (1.0 + 4.0 * d * dx);
  }
  return strength * (acc / static_cast<double>(correlators.size()));
}

EstimatedAffinities m_step(const LabeledGraph& graph, const MessageState& state,
                           const EstimatedAffinities& current, double clamp,
                           std::vector<bool>* frozen) {
  EstimatedAffinities next = current;
  if (frozen) frozen->assign(current.num_labels(), false);
  const auto corr = edge_correlators(graph, state);
  for (std::size_t a = 0; a < current.num_labels(); ++a) {
    if (a >= corr.size() || corr[a].empty()) {
      if (frozen) (*frozen)[a] = true;
      continue;
    }
    const double x = m_step_strength(current.strength[a], corr[a]);
    next.strength[a] = std::clamp(x, clamp, 1.0 - clamp);
  }
  return next;
}

EmTrajectory run_em(const LabeledGraph& graph, const EstimatedAffinities& init,
                    MessageInit init_mode, std::uint64_t seed, const EmConfig& config) {
  if (!(config.tol > 0.0)) throw std::invalid_argument("EM tolerance must be positive");
  EmTrajectory traj;
  EstimatedAffinities est = init;
  for (auto& x : est.strength) x = std::clamp(x, config.clamp, 1.0 - config.clamp);
  traj.estimates_history.push_back(est.strength);

  MessageState state = init_messages(graph, seed, init_mode);
  BpConfig bp = config.bp;
  if (config.sweeps_per_m_step > 0) {
    bp.max_sweeps = config.sweeps_per_m_step;
  }

  std::size_t unconverged = 0;
  traj.termination = EmTermination::MaxEmSteps;
  for (std::size_t step = 0; step < config.max_steps; ++step) {
    const BpResult r = run_bp(graph, est, state, bp);
    traj.bp_history.push_back({r.sweeps, r.converged, r.max_delta});
    if (!std::isfinite(r.max_delta)) {
      traj.termination = EmTermination::BpDiverged;
      break;
    }
    unconverged = r.converged ? 0 : unconverged + 1;

    EstimatedAffinities next = m_step(graph, state, est, config.clamp, &traj.frozen_labels);
    double change = 0.0;
    for (std::size_t a = 0; a < est.num_labels(); ++a)
      change = std::max(change, std::abs(next.strength[a] - est.strength[a]));
    est = std::move(next);
    traj.estimates_history.push_back(est.strength);

    // With a fixed sweep cadence an unconverged E-step is expected, so only
    // a converged E-step may end the run on a small parameter change.
    const bool e_step_settled = r.converged || config.sweeps_per_m_step > 0;
    if (change < config.tol && e_step_settled) {
      traj.termination = EmTermination::EstimatesConverged;
      break;
    }
    if (config.max_unconverged_streak > 0 && unconverged >= config.max_unconverged_streak) {
      traj.termination = EmTermination::BpDiverged;
      break;
    }
  }
  traj.final_marginals = state.marginals;
  traj.final_estimates = est;
  return traj;
}

std::vector<std::vector<double>> transient_attraction_rate(const EmTrajectory& trajectory) {
  const auto& h = trajectory.estimates_history;
  if (h.empty()) return {};
  std::vector<std::vector<double>> out(h.front().size());
  for (std::size_t t = 0; t + 1 < h.size(); ++t) {
    for (std::size_t a = 0; a < out.size(); ++a) {
      const double before = std::abs(h[t][a] - 0.5);
      const double after = std::abs(h[t + 1][a] - 0.5);
      out[a].push_back(before > 0.0 ? after / before : 1.0);
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const EmTrajectory& trajectory) {
  const auto& h = trajectory.estimates_history;
  const std::size_t p = h.empty() ? 0 : h.front().size();
  out << "step";
  for (std::size_t a = 0; a < p; ++a) out << ",x_hat_" << a + 1;
  out << ",bp_sweeps,bp_delta\n";
  out << std::setprecision(17);
  for (std::size_t t = 0; t < h.size(); ++t) {
    out << t;
    for (double x : h[t]) out << ',' << x;
    if (t == 0) {
      out << ",0,0\n";
    } else {
      const auto& r = trajectory.bp_history[t - 1];
      out << ',' << r.sweeps << ',' << r.max_delta << '\n';
    }
  }
}

}  // namespace lsbm

#include "lsbm/bp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lsbm {

namespace {

struct LabelCoupling {
  double c_in;
  double c_out;
};

std::vector<LabelCoupling> couplings(const LabeledGraph& graph,
                                     const EstimatedAffinities& estimates) {
  if (estimates.num_labels() < graph.num_labels() ||
      estimates.strength.size() != estimates.mean_degree.size())
    throw std::invalid_argument("estimates do not cover every label of the graph");
  std::vector<LabelCoupling> out(estimates.num_labels());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = {estimates.c_in(a), estimates.c_out(a)};
  return out;
}

void refresh_field(const std::vector<LabelCoupling>& cpl, std::size_t n, MessageState& state,
                   bool enabled) {
  if (!enabled || n == 0) {
    state.field = {0.0, 0.0};
    return;
  }
  double in = 0.0, out = 0.0;
  for (const auto& c : cpl) {
    in += c.c_in;
    out += c.c_out;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  state.field[0] = (state.module_mass[0] * in + state.module_mass[1] * out) * inv_n;
  state.field[1] = (state.module_mass[0] * out + state.module_mass[1] * in) * inv_n;
}

// exp(-h) rescaled so the larger entry is 1
Belief field_weight(const Belief& h) {
  const double lo = std::min(h[0], h[1]);
  return {std::exp(-(h[0] - lo)), std::exp(-(h[1] - lo))};
}

struct Scratch {
  std::vector<Belief> factor, prefix, suffix;
  void resize(std::size_t d) {
    if (factor.size() < d + 1) {
      factor.resize(d + 1);
      prefix.resize(d + 1);
      suffix.resize(d + 1);
    }
  }
};

// Normalized contribution of the message k->i to vertex i's belief.
inline Belief incoming_factor(const Belief& msg, const LabelCoupling& c) {
  Belief f = {msg[0] * c.c_in + msg[1] * c.c_out, msg[0] * c.c_out + msg[1] * c.c_in};
  const double z = f[0] + f[1];
  if (z > 0.0) {
    f[0] /= z;
    f[1] /= z;
  } else {
    f = {0.5, 0.5};
  }
  return f;
}

// Returns false when the normalizer underflowed (belief reset to uniform).
inline bool normalize(Belief& b) {
  const double z = b[0] + b[1];
  if (!(z > 0.0) || !std::isfinite(z)) {
    b = {0.5, 0.5};
    return false;
  }
  b[0] /= z;
  b[1] /= z;
  return true;
}

void set_marginal(MessageState& state, VertexId v, const Belief& m) {
  Belief& old = state.marginals[v];
  state.module_mass[0] += m[0] - old[0];
  state.module_mass[1] += m[1] - old[1];
  old = m;
}

}  // namespace

EstimatedAffinities EstimatedAffinities::from_graph(const LabeledGraph& graph,
                                                    std::vector<double> strength) {
  if (strength.size() != graph.num_labels())
    throw std::invalid_argument("need one strength per label");
  EstimatedAffinities est;
  est.strength = std::move(strength);
  for (Label a = 1; a <= graph.num_labels(); ++a)
    est.mean_degree.push_back(graph.num_vertices() == 0
                                  ? 0.0
                                  : 2.0 * static_cast<double>(graph.num_edges(a)) /
                                        static_cast<double>(graph.num_vertices()));
  return est;
}

EstimatedAffinities EstimatedAffinities::from_params(const EnsembleParams& params) {
  params.validate();
  return {params.mean_degree, params.strength};
}

MessageState init_messages(const LabeledGraph& graph, std::uint64_t seed, MessageInit mode,
                           double bias, std::span<const Module> planted) {
  MessageState s;
  s.schedule = make_rng(hash64(seed, 0x5343484544ULL));
  s.cavity.assign(graph.num_directed_edges(), Belief{0.5, 0.5});
  s.marginals.assign(graph.num_vertices(), Belief{0.5, 0.5});
  s.module_mass = {0.5 * static_cast<double>(graph.num_vertices()),
                   0.5 * static_cast<double>(graph.num_vertices())};
  switch (mode) {
    case MessageInit::Factorized:
      break;
    case MessageInit::UniformRandom: {
      Rng rng = make_rng(seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (auto& m : s.cavity) {
        const double u = unif(rng);
        m = {u, 1.0 - u};
      }
      break;
    }
    case MessageInit::PlantedBiased: {
      if (planted.size() != graph.num_vertices())
        throw std::invalid_argument("planted-biased init needs an assignment for every vertex");
      if (!(bias >= 0.0 && bias <= 0.5)) throw std::invalid_argument("bias must lie in [0, 1/2]");
      for (VertexId v = 0; v < graph.num_vertices(); ++v) {
        const Belief b = planted[v] == 0 ? Belief{0.5 + bias, 0.5 - bias}
                                         : Belief{0.5 - bias, 0.5 + bias};
        for (DirectedEdgeId e : graph.out_edges(v)) s.cavity[e] = b;
      }
      break;
    }
  }
  return s;
}

void bp_sweep(const LabeledGraph& graph, const EstimatedAffinities& estimates,
              MessageState& state, const BpConfig& config) {
  const auto cpl = couplings(graph, estimates);
  const std::size_t n = graph.num_vertices();
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  std::shuffle(order.begin(), order.end(), state.schedule);

  thread_local Scratch scratch;
  const double keep = config.damping, take = 1.0 - config.damping;
  double max_delta = 0.0;
  refresh_field(cpl, n, state, config.external_field);

  for (VertexId i : order) {
    const auto out = graph.out_edges(i);
    const std::size_t d = out.size();
    scratch.resize(d);
    auto& f = scratch.factor;
    auto& pre = scratch.prefix;
    auto& suf = scratch.suffix;
    for (std::size_t t = 0; t < d; ++t) {
      const DirectedEdgeId in = out[t] ^ 1u;
      f[t] = incoming_factor(state.cavity[in], cpl[graph.label(in) - 1]);
    }
    pre[0] = {1.0, 1.0};
    for (std::size_t t = 0; t < d; ++t) pre[t + 1] = {pre[t][0] * f[t][0], pre[t][1] * f[t][1]};
    suf[d] = {1.0, 1.0};
    for (std::size_t t = d; t-- > 0;) suf[t] = {suf[t + 1][0] * f[t][0], suf[t + 1][1] * f[t][1]};

    const Belief w = field_weight(state.field);
    for (std::size_t t = 0; t < d; ++t) {
      Belief m = {w[0] * pre[t][0] * suf[t + 1][0], w[1] * pre[t][1] * suf[t + 1][1]};
      if (!normalize(m)) ++state.underflow_count;
      Belief& old = state.cavity[out[t]];
      if (keep > 0.0) {
        m = {take * m[0] + keep * old[0], take * m[1] + keep * old[1]};
      }
      max_delta = std::max({max_delta, std::abs(m[0] - old[0]), std::abs(m[1] - old[1])});
      old = m;
    }
    Belief marginal = {w[0] * pre[d][0], w[1] * pre[d][1]};
    if (!normalize(marginal)) ++state.underflow_count;
    set_marginal(state, i, marginal);
    refresh_field(cpl, n, state, config.external_field);
  }
  state.last_max_delta = max_delta;
  ++state.iteration_count;
}

void update_marginals(const LabeledGraph& graph, const EstimatedAffinities& estimates,
                      MessageState& state, const BpConfig& config) {
  const auto cpl = couplings(graph, estimates);
  const Belief w = field_weight(state.field);
  std::vector<Belief> fresh(graph.num_vertices());
  for (VertexId i = 0; i < graph.num_vertices(); ++i) {
    Belief m = w;
    for (DirectedEdgeId e : graph.out_edges(i)) {
      const DirectedEdgeId in = e ^ 1u;
      const Belief f = incoming_factor(state.cavity[in], cpl[graph.label(in) - 1]);
      m = {m[0] * f[0], m[1] * f[1]};
    }
    if (!normalize(m)) ++state.underflow_count;
    fresh[i] = m;
  }
  state.marginals = std::move(fresh);
  state.module_mass = {0.0, 0.0};
  for (const auto& m : state.marginals) {
    state.module_mass[0] += m[0];
    state.module_mass[1] += m[1];
  }
  refresh_field(cpl, graph.num_vertices(), state, config.external_field);
}

BpResult run_bp(const LabeledGraph& graph, const EstimatedAffinities& estimates,
                MessageState& state, const BpConfig& config) {
  if (!(config.tol > 0.0)) throw std::invalid_argument("BP tolerance must be positive");
  BpResult r;
  while (r.sweeps < config.max_sweeps) {
    bp_sweep(graph, estimates, state, config);
    ++r.sweeps;
    if (!std::isfinite(state.last_max_delta)) break;
    if (state.last_max_delta < config.tol) {
      r.converged = true;
      break;
    }
  }
  r.max_delta = state.last_max_delta;
  update_marginals(graph, estimates, state, config);
  return r;
}

std::vector<std::vector<double>> edge_correlators(const LabeledGraph& graph,
                                                  const MessageState& state) {
  std::vector<std::vector<double>> out(graph.num_labels());
  for (Label a = 1; a <= graph.num_labels(); ++a) {
    const auto ids = graph.edges_with_label(a);
    out[a - 1].reserve(ids.size());
    for (EdgeId k : ids) out[a - 1].push_back(edge_correlator(state, k));
  }
  return out;
}

}  // namespace lsbm

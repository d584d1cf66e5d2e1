#include "lsbm/phase.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lsbm {

Threshold known_param_threshold(const EnsembleParams& params) {
  const auto d = derive_affinities(params);
  double acc = 0.0;
  for (std::size_t a = 0; a < d.per_label.size(); ++a)
    acc += d.per_label[a].delta * d.per_label[a].delta / d.fraction[a];
  Threshold t;
  t.lhs = std::sqrt(acc);
  t.rhs = 2.0 * std::sqrt(d.total_degree);
  t.detectable = t.lhs > t.rhs;
  return t;
}

EmThreshold em_threshold(const EnsembleParams& params) {
  const auto d = derive_affinities(params);
  EmThreshold t;
  for (std::size_t a = 0; a < d.per_label.size(); ++a) {
    t.strength_form.lhs += d.fraction[a] * std::abs(params.strength[a] - 0.5);
    t.delta_form.lhs += std::abs(d.per_label[a].delta);
  }
  t.strength_form.rhs = 1.0 / (2.0 * std::sqrt(d.total_degree));
  t.delta_form.rhs = 2.0 * std::sqrt(d.total_degree);
  t.strength_form.detectable = t.strength_form.lhs > t.strength_form.rhs;
  t.delta_form.detectable = t.delta_form.lhs > t.delta_form.rhs;
  return t;
}

Threshold single_label_threshold(const EnsembleParams& params, Label label) {
  params.validate();
  if (label < 1 || label > params.num_labels())
    throw std::invalid_argument("label " + std::to_string(label) + " out of range");
  const double c = params.mean_degree[label - 1];
  Threshold t;
  t.lhs = std::abs(delta_from_strength(params.strength[label - 1], c));
  t.rhs = 2.0 * std::sqrt(c);
  t.detectable = t.lhs > t.rhs;
  return t;
}

EnsembleParams drop_label(const EnsembleParams& params, Label label) {
  params.validate();
  if (label < 1 || label > params.num_labels())
    throw std::invalid_argument("label " + std::to_string(label) + " out of range");
  if (params.num_labels() < 2) throw std::invalid_argument("cannot drop the only label");
  EnsembleParams out = params;
  out.mean_degree.erase(out.mean_degree.begin() + (label - 1));
  out.strength.erase(out.strength.begin() + (label - 1));
  return out;
}

bool infeasibility_region(const EnsembleParams& params, Label dropped_label) {
  if (params.num_labels() < 2) return false;
  if (dropped_label == 0) dropped_label = static_cast<Label>(params.num_labels());
  if (em_threshold(params).detectable()) return false;
  return em_threshold(drop_label(params, dropped_label)).detectable();
}

PhaseVerdict phase_verdict(const EnsembleParams& params) {
  PhaseVerdict v;
  const Threshold known = known_param_threshold(params);
  const EmThreshold em = em_threshold(params);
  v.known_param_detectable = known.detectable;
  v.known_param_margin = known.margin();
  v.em_detectable_symmetric_init = em.detectable();
  v.em_margin = em.strength_form.margin();
  for (Label a = 1; a <= params.num_labels(); ++a) {
    const Threshold t = single_label_threshold(params, a);
    v.per_label_alone_detectable.push_back(t.detectable);
    v.per_label_margins.push_back(t.margin());
  }
  v.infeasible = infeasibility_region(params);
  return v;
}

std::vector<Module> hard_assignment(std::span<const Belief> marginals) {
  std::vector<Module> out(marginals.size());
  for (std::size_t i = 0; i < marginals.size(); ++i)
    out[i] = marginals[i][1] > marginals[i][0] ? 1 : 0;
  return out;
}

double overlap(std::span<const Module> inferred, std::span<const Module> planted) {
  if (inferred.size() != planted.size())
    throw std::invalid_argument("overlap: inferred has " + std::to_string(inferred.size()) +
                                " vertices, planted has " + std::to_string(planted.size()));
  if (planted.empty()) return 0.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < planted.size(); ++i) agree += inferred[i] == planted[i];
  const std::size_t n = planted.size();
  const std::size_t best = std::max(agree, n - agree);
  return static_cast<double>(2 * best - n) / static_cast<double>(n);
}

double overlap(std::span<const Belief> marginals, std::span<const Module> planted) {
  const auto hard = hard_assignment(marginals);
  return overlap(hard, planted);
}

}  // namespace lsbm

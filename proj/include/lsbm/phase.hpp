#pragma once

#include <span>
#include <vector>

#include "lsbm/bp.hpp"
#include "lsbm/params.hpp"
#include "lsbm/sampler.hpp"

namespace lsbm {

struct Threshold {
  double lhs = 0.0;
  double rhs = 0.0;
  bool detectable = false;
  double margin() const { return lhs - rhs; }
};

/// Known-parameter criterion: sqrt(sum |dc|^2 / P) vs 2 sqrt(c).
Threshold known_param_threshold(const EnsembleParams& params);

struct EmThreshold {
  Threshold strength_form;  // sum P |x - 1/2| vs 1 / (2 sqrt(c))
  Threshold delta_form;     // sum |dc| vs 2 sqrt(c)
  bool detectable() const { return strength_form.detectable; }
};

/// EM threshold for a corner-symmetric initial estimate with signs aligned
/// to the planted structure.
EmThreshold em_threshold(const EnsembleParams& params);

/// |dc_alpha| vs 2 sqrt(c_alpha) using label alpha (1-based) alone.
Threshold single_label_threshold(const EnsembleParams& params, Label label);

/// True when the full model is EM-undetectable but the model with
/// `dropped_label` discarded is EM-detectable. Defaults to the last label.
bool infeasibility_region(const EnsembleParams& params, Label dropped_label = 0);

/// Parameters with one label removed.
EnsembleParams drop_label(const EnsembleParams& params, Label label);

struct PhaseVerdict {
  bool known_param_detectable = false;
  bool em_detectable_symmetric_init = false;
  std::vector<bool> per_label_alone_detectable;
  double known_param_margin = 0.0;
  double em_margin = 0.0;
  std::vector<double> per_label_margins;
  bool infeasible = false;
};

PhaseVerdict phase_verdict(const EnsembleParams& params);

/// Hard assignment by argmax; an exact tie goes to module 0.
std::vector<Module> hard_assignment(std::span<const Belief> marginals);

/// (max over module permutations of agreement - 1/2) / (1 - 1/2).
/// Throws std::invalid_argument on a size mismatch.
double overlap(std::span<const Module> inferred, std::span<const Module> planted);
double overlap(std::span<const Belief> marginals, std::span<const Module> planted);

}  // namespace lsbm

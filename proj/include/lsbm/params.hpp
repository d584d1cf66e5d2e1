#pragma once

#include <cstddef>
#include <vector>

namespace lsbm {

/// Two-module labeled SBM ensemble. Label alpha (1-based in the model, index
/// alpha-1 here) has mean degree c_alpha and normalized strength x_alpha with
/// c_in = 2 c x and c_out = 2 c (1 - x).
struct EnsembleParams {
  int num_modules = 2;
  std::vector<double> mean_degree;  // c_alpha
  std::vector<double> strength;     // x_alpha in [0, 1]

  std::size_t num_labels() const { return mean_degree.size(); }

  /// Throws std::invalid_argument if any c <= 0, x outside [0,1], sizes
  /// disagree, or num_modules != 2.
  void validate() const;
};

struct LabelAffinity {
  double c_in = 0.0;
  double c_out = 0.0;
  double delta = 0.0;  // c_in - c_out
};

struct DerivedAffinities {
  std::vector<LabelAffinity> per_label;
  double total_degree = 0.0;      // c
  std::vector<double> fraction;   // P_alpha = c_alpha / c
};

DerivedAffinities derive_affinities(const EnsembleParams& params);

inline double strength_from_affinity(double c_in, double c_out) {
  return c_in / (c_in + c_out);
}
inline double strength_from_delta(double delta, double mean_degree) {
  return 0.5 + delta / (4.0 * mean_degree);
}
inline double delta_from_strength(double strength, double mean_degree) {
  return 4.0 * mean_degree * (strength - 0.5);
}

}  // namespace lsbm

#include "lsbm/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lsbm {

void EnsembleParams::validate() const {
  if (num_modules != 2) throw std::invalid_argument("only two modules are supported");
  if (mean_degree.empty()) throw std::invalid_argument("at least one label is required");
  if (strength.size() != mean_degree.size())
    throw std::invalid_argument("strength and mean_degree must have one entry per label");
  for (std::size_t a = 0; a < mean_degree.size(); ++a) {
    if (!(mean_degree[a] > 0.0) || !std::isfinite(mean_degree[a]))
      throw std::invalid_argument("mean degree of label " + std::to_string(a + 1) +
                                  " must be positive");
    if (!(strength[a] >= 0.0 && strength[a] <= 1.0))
      throw std::invalid_argument("strength of label " + std::to_string(a + 1) +
                                  " must lie in [0, 1]");
  }
}

DerivedAffinities derive_affinities(const EnsembleParams& params) {
  params.validate();
  DerivedAffinities d;
  for (double c : params.mean_degree) d.total_degree += c;
  for (std::size_t a = 0; a < params.num_labels(); ++a) {
    const double c = params.mean_degree[a], x = params.strength[a];
    LabelAffinity aff;
    aff.c_in = 2.0 * c * x;
    aff.c_out = 2.0 * c * (1.0 - x);
    aff.delta = delta_from_strength(x, c);
    d.per_label.push_back(aff);
    d.fraction.push_back(c / d.total_degree);
  }
  return d;
}

}  // namespace lsbm

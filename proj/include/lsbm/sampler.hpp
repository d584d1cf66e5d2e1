#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lsbm/graph.hpp"
#include "lsbm/params.hpp"

namespace lsbm {

/// Module index 0 or 1 (written as 1 or 2 in files).
using Module = std::uint8_t;

enum class AssignmentMode {
  Balanced,  // random permutation of floor(N/2) zeros and ceil(N/2) ones
  Iid,       // each vertex uniform on {0, 1}
};

enum class PairSampler {
  Blockwise,   // binomial edge counts per block, uniform placement, O(L)
  Exhaustive,  // categorical draw for every pair, O(N^2); for small-N checks
};

struct SamplerOptions {
  AssignmentMode assignment = AssignmentMode::Balanced;
  PairSampler pairs = PairSampler::Blockwise;
};

struct PlantedInstance {
  LabeledGraph graph;
  std::vector<Module> planted;
  EnsembleParams params;
  std::uint64_t seed = 0;
};

/// Draws a labeled SBM graph: pair (i, j) receives label alpha with
/// probability c^alpha_{sigma_i sigma_j} / N, exclusively across labels.
/// Throws std::invalid_argument when N < 2 or an affinity exceeds N.
PlantedInstance sample_instance(const EnsembleParams& params, std::size_t num_vertices,
                                std::uint64_t seed, const SamplerOptions& options = {});

std::vector<Module> read_assignment(std::istream& in);
void write_assignment(std::ostream& out, const std::vector<Module>& assignment);

}  // namespace lsbm

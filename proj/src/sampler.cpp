#include "lsbm/sampler.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "lsbm/random.hpp"

namespace lsbm {

namespace {

std::vector<Module> draw_assignment(std::size_t n, AssignmentMode mode, Rng& rng) {
  std::vector<Module> sigma(n, 0);
  if (mode == AssignmentMode::Balanced) {
    for (std::size_t i = n / 2; i < n; ++i) sigma[i] = 1;
    std::shuffle(sigma.begin(), sigma.end(), rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (auto& s : sigma) s = coin(rng) ? 1 : 0;
  }
  return sigma;
}

void check_density(const DerivedAffinities& aff, std::size_t n) {
  double in_total = 0.0, out_total = 0.0;
  for (std::size_t a = 0; a < aff.per_label.size(); ++a) {
    const auto& la = aff.per_label[a];
    if (la.c_in > static_cast<double>(n) || la.c_out > static_cast<double>(n))
      throw std::invalid_argument("label " + std::to_string(a + 1) +
                                  " has affinity / N > 1; N=" + std::to_string(n) +
                                  " is too small for the requested density");
    in_total += la.c_in;
    out_total += la.c_out;
  }
  if (in_total > static_cast<double>(n) || out_total > static_cast<double>(n))
    throw std::invalid_argument("summed label affinities exceed N=" + std::to_string(n));
}

std::vector<LabeledEdge> sample_exhaustive(const DerivedAffinities& aff,
                                           const std::vector<Module>& sigma, Rng& rng) {
  const std::size_t n = sigma.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<LabeledEdge> edges;
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) {
      const bool same = sigma[i] == sigma[j];
      double u = unif(rng);
      for (std::size_t a = 0; a < aff.per_label.size(); ++a) {
        const double prob = (same ? aff.per_label[a].c_in : aff.per_label[a].c_out) * inv_n;
        if (u < prob) {
          edges.push_back({i, j, static_cast<Label>(a + 1)});
          break;
        }
        u -= prob;
      }
    }
  }
  return edges;
}

std::vector<LabeledEdge> sample_blockwise(const DerivedAffinities& aff,
                                          const std::vector<Module>& sigma, Rng& rng) {
  const std::size_t n = sigma.size();
  std::array<std::vector<VertexId>, 2> members;
  for (VertexId v = 0; v < n; ++v) members[sigma[v]].push_back(v);
  const double n0 = static_cast<double>(members[0].size());
  const double n1 = static_cast<double>(members[1].size());
  // blocks: in-module 0, in-module 1, cross
  const std::array<double, 3> pairs = {n0 * (n0 - 1) / 2, n1 * (n1 - 1) / 2, n0 * n1};
  std::array<double, 3> used = {0, 0, 0};

  std::unordered_set<std::uint64_t> taken;
  std::vector<LabeledEdge> edges;
  edges.reserve(static_cast<std::size_t>(aff.total_degree * static_cast<double>(n) * 0.6) + 16);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t a = 0; a < aff.per_label.size(); ++a) {
    const auto& la = aff.per_label[a];
    for (int b = 0; b < 3; ++b) {
      if (pairs[b] < 1) continue;
      const double prob = (b < 2 ? la.c_in : la.c_out) * inv_n;
      if (prob <= 0.0) continue;
      std::binomial_distribution<long long> count_dist(static_cast<long long>(pairs[b]),
                                                       std::min(prob, 1.0));
      long long count = count_dist(rng);
      count = std::min<long long>(count, static_cast<long long>(pairs[b] - used[b]));
      const auto& lhs = members[b == 1 ? 1 : 0];
      const auto& rhs = members[b == 0 ? 0 : 1];
      std::uniform_int_distribution<std::size_t> pick_l(0, lhs.size() - 1);
      std::uniform_int_distribution<std::size_t> pick_r(0, rhs.size() - 1);
      for (long long placed = 0; placed < count;) {
        VertexId u = lhs[pick_l(rng)], v = rhs[pick_r(rng)];
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (!taken.insert(static_cast<std::uint64_t>(u) * n + v).second) continue;
        edges.push_back({u, v, static_cast<Label>(a + 1)});
        ++placed;
      }
      used[b] += static_cast<double>(count);
    }
  }
  return edges;
}

}  // namespace

PlantedInstance sample_instance(const EnsembleParams& params, std::size_t num_vertices,
                                std::uint64_t seed, const SamplerOptions& options) {
  if (num_vertices < 2) throw std::invalid_argument("need at least two vertices");
  const DerivedAffinities aff = derive_affinities(params);
  check_density(aff, num_vertices);

  Rng rng = make_rng(seed);
  std::vector<Module> sigma = draw_assignment(num_vertices, options.assignment, rng);
  std::vector<LabeledEdge> edges = options.pairs == PairSampler::Exhaustive
                                       ? sample_exhaustive(aff, sigma, rng)
                                       : sample_blockwise(aff, sigma, rng);
  return {LabeledGraph::build(num_vertices, params.num_labels(), edges), std::move(sigma), params,
          seed};
}

std::vector<Module> read_assignment(std::istream& in) {
  std::vector<std::pair<std::size_t, int>> rows;
  std::string line;
  std::size_t max_vertex = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    long long i = -1;
    int s = 0;
    if (!(fields >> i >> s) || i < 0 || (s != 1 && s != 2))
      throw std::invalid_argument("malformed assignment line: " + line);
    rows.emplace_back(static_cast<std::size_t>(i), s);
    max_vertex = std::max<std::size_t>(max_vertex, i);
  }
  std::vector<Module> out(rows.empty() ? 0 : max_vertex + 1, 0);
  for (auto [i, s] : rows) out[i] = static_cast<Module>(s - 1);
  return out;
}

void write_assignment(std::ostream& out, const std::vector<Module>& assignment) {
  for (std::size_t i = 0; i < assignment.size(); ++i)
    out << i << '\t' << static_cast<int>(assignment[i]) + 1 << '\n';
}

}  // namespace lsbm

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsbm/em.hpp"
#include "lsbm/phase.hpp"
#include "lsbm/sampler.hpp"
#include "lsbm/spectral.hpp"

namespace lsbm {

/// How the EM run is seeded with initial strengths.
struct InitEstimate {
  enum class Kind { Explicit, AlignedCorner };
  Kind kind = Kind::AlignedCorner;
  std::vector<double> values;  // Explicit
  double offset = 0.4;         // AlignedCorner: x_hat = 1/2 + offset * sign(x - 1/2)

  std::vector<double> resolve(const std::vector<double>& planted_strength) const;
};

struct SweepConfig {
  std::vector<std::vector<double>> points;       // planted strengths, one vector per point
  std::vector<std::vector<double>> degree_sets;  // mean degrees; crossed with points
  std::size_t num_vertices = 10000;
  std::size_t samples_per_point = 5;
  std::uint64_t seed_base = 1;
  InitEstimate init;
  MessageInit init_mode = MessageInit::UniformRandom;
  EmConfig em;
  SamplerOptions sampler;
  std::size_t threads = 0;  // 0: hardware concurrency
  double overlap_cutoff = 0.05;

  /// Accepts either "grid" (per-label value lists, Cartesian product) or
  /// "points"; "degrees" (one vector) or "degree_sets". Missing keys keep
  /// their defaults. Throws std::invalid_argument on an invalid config.
  static SweepConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct SampleOutcome {
  std::uint64_t seed = 0;
  double overlap = 0.0;
  std::size_t em_steps = 0;
  EmTermination termination = EmTermination::MaxEmSteps;
  std::vector<double> final_strength;
  bool failed = false;
  std::string error;
};

struct PointResult {
  std::vector<double> strength;
  std::vector<double> degrees;
  std::vector<SampleOutcome> samples;
  double overlap_mean = 0.0;
  double overlap_median = 0.0;
  bool all_failed = false;
  bool empirically_detectable = false;  // median overlap > cutoff
  PhaseVerdict verdict;
};

struct SweepResult {
  SweepConfig config;
  std::vector<PointResult> points;
};

/// Per-unit seed: hash64(seed_base, unit point index, sample index).
std::uint64_t unit_seed(std::uint64_t seed_base, std::size_t point, std::size_t sample);

/// Runs `count` independent jobs on a bounded pool; job k writes only slot k.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job);

/// One sample: instance -> EM -> overlap against the planted partition.
SampleOutcome run_sample(const EnsembleParams& params, const SweepConfig& config,
                         std::uint64_t seed);

SweepResult run_phase_sweep(const SweepConfig& config);

double median(std::vector<double> values);

void write_sweep_points_csv(std::ostream& out, const SweepResult& result);
void write_sweep_samples_csv(std::ostream& out, const SweepResult& result);
nlohmann::json sweep_summary_json(const SweepResult& result);

struct TrajectoryConfig {
  EnsembleParams planted;
  std::vector<std::vector<double>> inits;
  std::size_t num_vertices = 10000;
  std::vector<std::uint64_t> seeds = {1};
  MessageInit init_mode = MessageInit::UniformRandom;
  EmConfig em;
  std::size_t threads = 0;
  /// Estimates at which to compute empirical spectra of B' on a companion
  /// instance of size spectrum_vertices.
  std::vector<std::vector<double>> spectrum_snapshots;
  std::size_t spectrum_vertices = 500;
  SpectrumOptions spectrum;

  static TrajectoryConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TrajectoryRun {
  std::vector<double> init;
  std::uint64_t seed = 0;
  EmTrajectory trajectory;
  double overlap = 0.0;
};

struct SnapshotSpectrum {
  std::vector<double> strength;
  SpectralSummary summary;
};

struct TrajectoryBundle {
  std::vector<TrajectoryRun> runs;
  std::vector<SnapshotSpectrum> spectra;
};

TrajectoryBundle run_trajectory_experiment(const TrajectoryConfig& config);

/// Spectrum of B' built with `estimate` strengths on a fresh instance of
/// `planted` with `num_vertices` vertices.
SnapshotSpectrum snapshot_spectrum(const EnsembleParams& planted,
                                   const std::vector<double>& estimate,
                                   std::size_t num_vertices, std::uint64_t seed,
                                   const SpectrumOptions& options = {});

struct HistogramConfig {
  std::vector<double> strength;
  std::vector<double> degrees;     // base degrees; the swept label is overwritten
  Label swept_label = 2;
  std::vector<double> values;
  std::size_t samples = 30;
  std::size_t num_vertices = 10000;
  std::uint64_t seed_base = 1;
  InitEstimate init;
  EmConfig em;
  std::size_t threads = 0;

  static HistogramConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  SweepConfig as_sweep() const;
};

struct HistogramResult {
  HistogramConfig config;
  SweepResult sweep;
};

HistogramResult run_overlap_histogram(const HistogramConfig& config);

/// Columns c_<label>, sample_idx, overlap.
void write_histogram_csv(std::ostream& out, const HistogramResult& result);
/// Columns c_<label>, median, mean, em_detectable.
void write_histogram_medians_csv(std::ostream& out, const HistogramResult& result);

EmConfig em_config_from_json(const nlohmann::json& j, EmConfig base = {});
nlohmann::json em_config_to_json(const EmConfig& config);
MessageInit message_init_from_string(const std::string& s);
const char* to_string(MessageInit mode);

}  // namespace lsbm

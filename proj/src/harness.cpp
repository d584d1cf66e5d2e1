#include "lsbm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "lsbm/random.hpp"

namespace lsbm {

using nlohmann::json;

namespace {

// salts for per-unit seed streams
constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kMessageStream = 2;

std::vector<std::vector<double>> cartesian(const std::vector<std::vector<double>>& axes) {
  std::vector<std::vector<double>> out = {{}};
  for (const auto& axis : axes) {
    if (axis.empty()) throw std::invalid_argument("grid axis is empty");
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out)
      for (double v : axis) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

InitEstimate init_from_json(const json& j) {
  InitEstimate init;
  if (j.is_array()) {
    init.kind = InitEstimate::Kind::Explicit;
    init.values = j.get<std::vector<double>>();
  } else if (j.is_object()) {
    init.kind = InitEstimate::Kind::AlignedCorner;
    init.offset = j.value("aligned_corner", init.offset);
  } else {
    throw std::invalid_argument("init_estimates must be a list or {\"aligned_corner\": d}");
  }
  return init;
}

json init_to_json(const InitEstimate& init) {
  if (init.kind == InitEstimate::Kind::Explicit) return init.values;
  return json{{"aligned_corner", init.offset}};
}

}  // namespace

const char* to_string(MessageInit mode) {
  switch (mode) {
    case MessageInit::UniformRandom: return "uniform-random";
    case MessageInit::Factorized: return "factorized";
    case MessageInit::PlantedBiased: return "planted-biased";
  }
  return "unknown";
}

MessageInit message_init_from_string(const std::string& s) {
  if (s == "uniform-random") return MessageInit::UniformRandom;
  if (s == "factorized") return MessageInit::Factorized;
  if (s == "planted-biased") return MessageInit::PlantedBiased;
  throw std::invalid_argument("unknown message init mode '" + s + "'");
}

EmConfig em_config_from_json(const json& j, EmConfig c) {
  if (j.is_null()) return c;
  c.tol = j.value("em_tol", c.tol);
  c.max_steps = j.value("max_em_steps", c.max_steps);
  c.sweeps_per_m_step = j.value("sweeps_per_m_step", c.sweeps_per_m_step);
  c.clamp = j.value("clamp", c.clamp);
  c.max_unconverged_streak = j.value("max_unconverged_streak", c.max_unconverged_streak);
  c.bp.tol = j.value("bp_tol", c.bp.tol);
  c.bp.max_sweeps = j.value("max_sweeps", c.bp.max_sweeps);
  c.bp.damping = j.value("damping", c.bp.damping);
  c.bp.external_field = j.value("external_field", c.bp.external_field);
  if (!(c.tol > 0.0) || !(c.bp.tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(c.bp.damping >= 0.0 && c.bp.damping < 1.0))
    throw std::invalid_argument("damping must lie in [0, 1)");
  return c;
}

json em_config_to_json(const EmConfig& c) {
  return {{"em_tol", c.tol},
          {"max_em_steps", c.max_steps},
          {"sweeps_per_m_step", c.sweeps_per_m_step},
          {"clamp", c.clamp},
          {"max_unconverged_streak", c.max_unconverged_streak},
          {"bp_tol", c.bp.tol},
          {"max_sweeps", c.bp.max_sweeps},
          {"damping", c.bp.damping},
          {"external_field", c.bp.external_field}};
}

std::vector<double> InitEstimate::resolve(const std::vector<double>& planted_strength) const {
  if (kind == Kind::Explicit) {
    if (values.size() != planted_strength.size())
      throw std::invalid_argument("initial estimate needs one value per label");
    return values;
  }
  std::vector<double> out;
  for (double x : planted_strength) out.push_back(x < 0.5 ? 0.5 - offset : 0.5 + offset);
  return out;
}

SweepConfig SweepConfig::from_json(const json& j) {
  SweepConfig c;
  if (j.contains("grid")) c.points = cartesian(j.at("grid").get<std::vector<std::vector<double>>>());
  if (j.contains("points")) {
    auto extra = j.at("points").get<std::vector<std::vector<double>>>();
    c.points.insert(c.points.end(), extra.begin(), extra.end());
  }
  if (j.contains("degrees")) c.degree_sets = {j.at("degrees").get<std::vector<double>>()};
  if (j.contains("degree_sets"))
    c.degree_sets = j.at("degree_sets").get<std::vector<std::vector<double>>>();
  c.num_vertices = j.value("num_vertices", c.num_vertices);
  c.samples_per_point = j.value("samples_per_point", c.samples_per_point);
  c.seed_base = j.value("seed_base", c.seed_base);
  if (j.contains("init_estimates")) c.init = init_from_json(j.at("init_estimates"));
  if (j.contains("init_mode")) c.init_mode = message_init_from_string(j.at("init_mode"));
  c.em = em_config_from_json(j.value("em", json()), c.em);
  c.threads = j.value("threads", c.threads);
  c.overlap_cutoff = j.value("overlap_cutoff", c.overlap_cutoff);
  if (j.value("assignment", std::string("balanced")) == "iid")
    c.sampler.assignment = AssignmentMode::Iid;
  c.validate();
  return c;
}

json SweepConfig::to_json() const {
  return {{"points", points},
          {"degree_sets", degree_sets},
          {"num_vertices", num_vertices},
          {"samples_per_point", samples_per_point},
          {"seed_base", seed_base},
          {"init_estimates", init_to_json(init)},
          {"init_mode", lsbm::to_string(init_mode)},
          {"em", em_config_to_json(em)},
          {"threads", threads},
          {"overlap_cutoff", overlap_cutoff},
          {"assignment", sampler.assignment == AssignmentMode::Iid ? "iid" : "balanced"}};
}

void SweepConfig::validate() const {
  if (points.empty()) throw std::invalid_argument("sweep grid is empty");
  if (degree_sets.empty()) throw std::invalid_argument("sweep needs mean degrees");
  if (samples_per_point < 1) throw std::invalid_argument("samples_per_point must be >= 1");
  if (init_mode == MessageInit::PlantedBiased)
    throw std::invalid_argument("planted-biased init is a test utility, not a sweep mode");
  for (const auto& p : points)
    for (const auto& d : degree_sets) EnsembleParams{2, d, p}.validate();
}

std::uint64_t unit_seed(std::uint64_t seed_base, std::size_t point, std::size_t sample) {
  return hash64(seed_base, point, sample);
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) job(k);
    });
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

SampleOutcome run_sample(const EnsembleParams& params, const SweepConfig& config,
                         std::uint64_t seed) {
  SampleOutcome out;
  out.seed = seed;
  try {
    const auto inst =
        sample_instance(params, config.num_vertices, hash64(seed, kGraphStream), config.sampler);
    const auto init = EstimatedAffinities::from_graph(inst.graph, config.init.resolve(params.strength));
    const auto traj =
        run_em(inst.graph, init, config.init_mode, hash64(seed, kMessageStream), config.em);
    out.overlap = overlap(traj.final_marginals, inst.planted);
    out.em_steps = traj.bp_history.size();
    out.termination = traj.termination;
    out.final_strength = traj.final_estimates.strength;
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

SweepResult run_phase_sweep(const SweepConfig& config) {
  config.validate();
  SweepResult result;
  result.config = config;
  for (const auto& d : config.degree_sets)
    for (const auto& p : config.points) {
      PointResult pr;
      pr.strength = p;
      pr.degrees = d;
      pr.samples.resize(config.samples_per_point);
      pr.verdict = phase_verdict(EnsembleParams{2, d, p});
      result.points.push_back(std::move(pr));
    }

  const std::size_t s = config.samples_per_point;
  parallel_for(result.points.size() * s, config.threads, [&](std::size_t unit) {
    auto& pr = result.points[unit / s];
    const EnsembleParams params{2, pr.degrees, pr.strength};
    pr.samples[unit % s] = run_sample(params, config, unit_seed(config.seed_base, unit / s, unit % s));
  });

  for (auto& pr : result.points) {
    std::vector<double> ok;
    for (const auto& so : pr.samples)
      if (!so.failed) ok.push_back(so.overlap);
    pr.all_failed = ok.empty();
    if (!ok.empty()) {
      double sum = 0.0;
      for (double v : ok) sum += v;
      pr.overlap_mean = sum / static_cast<double>(ok.size());
      pr.overlap_median = median(ok);
    }
    pr.empirically_detectable = !pr.all_failed && pr.overlap_median > config.overlap_cutoff;
  }
  return result;
}

void write_sweep_points_csv(std::ostream& out, const SweepResult& result) {
  const std::size_t p = result.points.empty() ? 0 : result.points.front().strength.size();
  out << "point";
  for (std::size_t a = 0; a < p; ++a) out << ",x_" << a + 1;
  for (std::size_t a = 0; a < p; ++a) out << ",c_" << a + 1;
  out << ",samples,failed,overlap_mean,overlap_median,empirical_detectable,"
         "known_param_detectable,em_detectable,infeasible,known_param_margin,em_margin\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const auto& pr = result.points[k];
    std::size_t failed = 0;
    for (const auto& so : pr.samples) failed += so.failed;
    out << k;
    for (double x : pr.strength) out << ',' << x;
    for (double c : pr.degrees) out << ',' << c;
    out << ',' << pr.samples.size() << ',' << failed << ',' << pr.overlap_mean << ','
        << pr.overlap_median << ',' << pr.empirically_detectable << ','
        << pr.verdict.known_param_detectable << ',' << pr.verdict.em_detectable_symmetric_init
        << ',' << pr.verdict.infeasible << ',' << pr.verdict.known_param_margin << ','
        << pr.verdict.em_margin << '\n';
  }
}

void write_sweep_samples_csv(std::ostream& out, const SweepResult& result) {
  const std::size_t p = result.points.empty() ? 0 : result.points.front().strength.size();
  out << "point,sample_idx,seed,overlap,em_steps,termination";
  for (std::size_t a = 0; a < p; ++a) out << ",x_hat_" << a + 1;
  out << ",error\n" << std::setprecision(17);
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const auto& pr = result.points[k];
    for (std::size_t s = 0; s < pr.samples.size(); ++s) {
      const auto& so = pr.samples[s];
      out << k << ',' << s << ',' << so.seed << ',' << so.overlap << ',' << so.em_steps << ','
          << (so.failed ? "failed" : to_string(so.termination));
      for (std::size_t a = 0; a < p; ++a)
        out << ',' << (a < so.final_strength.size() ? so.final_strength[a] : 0.0);
      std::string quoted;
      for (char ch : so.error) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      out << ',' << '"' << quoted << '"' << '\n';
    }
  }
}

json sweep_summary_json(const SweepResult& result) {
  json points = json::array();
  for (const auto& pr : result.points) {
    points.push_back({{"strength", pr.strength},
                      {"degrees", pr.degrees},
                      {"overlap_mean", pr.overlap_mean},
                      {"overlap_median", pr.overlap_median},
                      {"all_failed", pr.all_failed},
                      {"empirically_detectable", pr.empirically_detectable},
                      {"known_param_detectable", pr.verdict.known_param_detectable},
                      {"em_detectable", pr.verdict.em_detectable_symmetric_init},
                      {"per_label_alone_detectable", pr.verdict.per_label_alone_detectable},
                      {"infeasible", pr.verdict.infeasible}});
  }
  return {{"config", result.config.to_json()}, {"points", points}};
}

TrajectoryConfig TrajectoryConfig::from_json(const json& j) {
  TrajectoryConfig c;
  c.planted.mean_degree = j.at("degrees").get<std::vector<double>>();
  c.planted.strength = j.at("planted").get<std::vector<double>>();
  c.planted.validate();
  if (j.contains("inits")) c.inits = j.at("inits").get<std::vector<std::vector<double>>>();
  if (c.inits.empty()) c.inits = {InitEstimate{}.resolve(c.planted.strength)};
  c.num_vertices = j.value("num_vertices", c.num_vertices);
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("init_mode")) c.init_mode = message_init_from_string(j.at("init_mode"));
  c.em = em_config_from_json(j.value("em", json()), c.em);
  c.threads = j.value("threads", c.threads);
  if (j.contains("spectrum_snapshots"))
    c.spectrum_snapshots = j.at("spectrum_snapshots").get<std::vector<std::vector<double>>>();
  c.spectrum_vertices = j.value("spectrum_vertices", c.spectrum_vertices);
  return c;
}

json TrajectoryConfig::to_json() const {
  return {{"degrees", planted.mean_degree},
          {"planted", planted.strength},
          {"inits", inits},
          {"num_vertices", num_vertices},
          {"seeds", seeds},
          {"init_mode", lsbm::to_string(init_mode)},
          {"em", em_config_to_json(em)},
          {"threads", threads},
          {"spectrum_snapshots", spectrum_snapshots},
          {"spectrum_vertices", spectrum_vertices}};
}

SnapshotSpectrum snapshot_spectrum(const EnsembleParams& planted,
                                   const std::vector<double>& estimate,
                                   std::size_t num_vertices, std::uint64_t seed,
                                   const SpectrumOptions& options) {
  const auto inst = sample_instance(planted, num_vertices, seed);
  const auto est = EstimatedAffinities::from_graph(inst.graph, estimate);
  const NbOperator op(inst.graph, est);
  std::vector<double> planted_delta(planted.num_labels());
  for (std::size_t a = 0; a < planted_delta.size(); ++a)
    planted_delta[a] = delta_from_strength(planted.strength[a], est.mean_degree[a]);
  return {estimate, empirical_spectrum(op, est, options, planted_delta)};
}

TrajectoryBundle run_trajectory_experiment(const TrajectoryConfig& config) {
  config.planted.validate();
  if (config.inits.empty()) throw std::invalid_argument("no initial estimates given");
  TrajectoryBundle bundle;
  for (std::uint64_t seed : config.seeds)
    for (const auto& init : config.inits) bundle.runs.push_back({init, seed, {}, 0.0});
  bundle.spectra.resize(config.spectrum_snapshots.size());

  const std::size_t runs = bundle.runs.size();
  parallel_for(runs + bundle.spectra.size(), config.threads, [&](std::size_t k) {
    if (k < runs) {
      auto& run = bundle.runs[k];
      const auto inst =
          sample_instance(config.planted, config.num_vertices, hash64(run.seed, kGraphStream));
      const auto est = EstimatedAffinities::from_graph(inst.graph, run.init);
      run.trajectory =
          run_em(inst.graph, est, config.init_mode, hash64(run.seed, kMessageStream), config.em);
      run.overlap = overlap(run.trajectory.final_marginals, inst.planted);
    } else {
      const std::size_t s = k - runs;
      const std::uint64_t seed = hash64(config.seeds.front(), kGraphStream, 500 + s);
      bundle.spectra[s] = snapshot_spectrum(config.planted, config.spectrum_snapshots[s],
                                            config.spectrum_vertices, seed, config.spectrum);
    }
  });
  return bundle;
}

HistogramConfig HistogramConfig::from_json(const json& j) {
  HistogramConfig c;
  c.strength = j.at("strength").get<std::vector<double>>();
  c.degrees = j.at("degrees").get<std::vector<double>>();
  c.swept_label = j.value("swept_label", c.swept_label);
  c.values = j.at("values").get<std::vector<double>>();
  c.samples = j.value("samples", c.samples);
  c.num_vertices = j.value("num_vertices", c.num_vertices);
  c.seed_base = j.value("seed_base", c.seed_base);
  if (j.contains("init_estimates")) c.init = init_from_json(j.at("init_estimates"));
  c.em = em_config_from_json(j.value("em", json()), c.em);
  c.threads = j.value("threads", c.threads);
  return c;
}

json HistogramConfig::to_json() const {
  return {{"strength", strength},
          {"degrees", degrees},
          {"swept_label", swept_label},
          {"values", values},
          {"samples", samples},
          {"num_vertices", num_vertices},
          {"seed_base", seed_base},
          {"init_estimates", init_to_json(init)},
          {"em", em_config_to_json(em)},
          {"threads", threads}};
}

SweepConfig HistogramConfig::as_sweep() const {
  if (values.empty()) throw std::invalid_argument("histogram sweep has no values");
  if (swept_label < 1 || swept_label > degrees.size())
    throw std::invalid_argument("swept label out of range");
  SweepConfig s;
  s.points = {strength};
  for (double v : values) {
    auto d = degrees;
    d[swept_label - 1] = v;
    s.degree_sets.push_back(std::move(d));
  }
  s.num_vertices = num_vertices;
  s.samples_per_point = samples;
  s.seed_base = seed_base;
  s.init = init;
  s.em = em;
  s.threads = threads;
  return s;
}

HistogramResult run_overlap_histogram(const HistogramConfig& config) {
  return {config, run_phase_sweep(config.as_sweep())};
}

void write_histogram_csv(std::ostream& out, const HistogramResult& result) {
  const Label a = result.config.swept_label;
  out << "c_" << a << ",sample_idx,overlap\n" << std::setprecision(17);
  for (const auto& pr : result.sweep.points)
    for (std::size_t s = 0; s < pr.samples.size(); ++s)
      out << pr.degrees[a - 1] << ',' << s << ',' << pr.samples[s].overlap << '\n';
}

void write_histogram_medians_csv(std::ostream& out, const HistogramResult& result) {
  const Label a = result.config.swept_label;
  out << "c_" << a << ",median,mean,em_detectable\n" << std::setprecision(17);
  for (const auto& pr : result.sweep.points)
    out << pr.degrees[a - 1] << ',' << pr.overlap_median << ',' << pr.overlap_mean << ','
        << pr.verdict.em_detectable_symmetric_init << '\n';
}

}  // namespace lsbm

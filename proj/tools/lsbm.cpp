// Command-line driver for sampling, inference, spectra and phase experiments.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsbm/em.hpp"
#include "lsbm/graph.hpp"
#include "lsbm/harness.hpp"
#include "lsbm/phase.hpp"
#include "lsbm/sampler.hpp"
#include "lsbm/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lsbm;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::size_t> threads;
  std::string graph_in;
  bool write_planted = false;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const CommonOptions& opt) {
  if (opt.config_path.empty()) return json::object();
  std::ifstream in(opt.config_path);
  if (!in) throw UsageError("cannot open config file: " + opt.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError("malformed config " + opt.config_path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  return j;
}

fs::path out_path(const CommonOptions& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  return fs::path(opt.out_dir) / name;
}

std::ofstream open_out(const CommonOptions& opt, const std::string& name) {
  auto path = out_path(opt, name);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

void write_json(const CommonOptions& opt, const std::string& name, const json& j) {
  auto out = open_out(opt, name);
  out << j.dump(2) << '\n';
}

void echo_config(const CommonOptions& opt, const std::string& command, json resolved) {
  json echo{{"command", command}, {"config", std::move(resolved)}};
  if (!opt.graph_in.empty()) echo["graph_in"] = opt.graph_in;
  write_json(opt, "config.json", echo);
}

EnsembleParams params_from(const json& j, const char* strength_key = "strength") {
  if (!j.contains("degrees")) throw UsageError("config is missing \"degrees\"");
  if (!j.contains(strength_key))
    throw UsageError(std::string("config is missing \"") + strength_key + "\"");
  EnsembleParams p;
  p.mean_degree = j.at("degrees").get<std::vector<double>>();
  p.strength = j.at(strength_key).get<std::vector<double>>();
  p.validate();
  return p;
}

SamplerOptions sampler_from(const json& j) {
  SamplerOptions s;
  const auto mode = j.value("assignment", std::string("balanced"));
  if (mode == "iid") s.assignment = AssignmentMode::Iid;
  else if (mode != "balanced") throw UsageError("unknown assignment mode: " + mode);
  if (j.value("exhaustive", false)) s.pairs = PairSampler::Exhaustive;
  return s;
}

std::uint64_t seed_of(const CommonOptions& opt, const json& j, const char* key = "seed") {
  if (opt.seed) return *opt.seed;
  return j.value(key, std::uint64_t{1});
}

/// A graph from --graph-in, or a fresh planted instance from the config.
struct Instance {
  LabeledGraph graph;
  std::optional<std::vector<Module>> planted;
  std::optional<EnsembleParams> params;
};

Instance load_or_sample(const CommonOptions& opt, const json& j, std::uint64_t seed) {
  if (!opt.graph_in.empty()) {
    Instance inst{read_edge_list_file(opt.graph_in), std::nullopt, std::nullopt};
    if (j.contains("planted_in")) {
      const auto path = j.at("planted_in").get<std::string>();
      std::ifstream in(path);
      if (!in) throw UsageError("cannot open assignment file: " + path);
      inst.planted = read_assignment(in);
      if (inst.planted->size() != inst.graph.num_vertices())
        throw UsageError("assignment size does not match the graph");
    }
    if (j.contains("degrees") && j.contains("strength")) inst.params = params_from(j);
    return inst;
  }
  auto params = params_from(j);
  auto sampled = sample_instance(params, j.value("num_vertices", std::size_t{10000}), seed,
                                 sampler_from(j));
  return Instance{std::move(sampled.graph), std::move(sampled.planted), params};
}

int cmd_sample(const CommonOptions& opt) {
  json j = load_config(opt);
  const auto seed = seed_of(opt, j);
  auto params = params_from(j);
  const auto n = j.value("num_vertices", std::size_t{10000});
  auto inst = sample_instance(params, n, seed, sampler_from(j));
  j["seed"] = seed;
  j["num_vertices"] = n;
  echo_config(opt, "sample", j);
  {
    auto out = open_out(opt, "graph.tsv");
    write_edge_list(out, inst.graph);
  }
  if (opt.write_planted) {
    auto out = open_out(opt, "planted.tsv");
    write_assignment(out, inst.planted);
  }
  json summary{{"num_vertices", inst.graph.num_vertices()},
               {"num_edges", inst.graph.num_edges()},
               {"edges_per_label", json::array()}};
  for (Label a = 1; a <= inst.graph.num_labels(); ++a)
    summary["edges_per_label"].push_back(inst.graph.num_edges(a));
  write_json(opt, "summary.json", summary);
  return 0;
}

std::vector<double> init_strength(const json& j, const std::optional<EnsembleParams>& params,
                                  std::size_t num_labels) {
  if (j.contains("init") && j.at("init").is_array()) {
    auto v = j.at("init").get<std::vector<double>>();
    if (v.size() != num_labels) throw UsageError("\"init\" must have one entry per label");
    return v;
  }
  InitEstimate init;
  if (j.contains("init")) init.offset = j.at("init").at("aligned_corner").get<double>();
  if (!params) throw UsageError("an aligned-corner init needs planted \"degrees\"/\"strength\"");
  return init.resolve(params->strength);
}

int cmd_em(const CommonOptions& opt) {
  json j = load_config(opt);
  const auto seed = seed_of(opt, j);
  auto inst = load_or_sample(opt, j, hash64(seed, 1));
  const auto x0 = init_strength(j, inst.params, inst.graph.num_labels());
  const auto init_mode = message_init_from_string(j.value("init_mode", std::string("uniform-random")));
  const EmConfig cfg = em_config_from_json(j.value("em", json::object()));
  j["seed"] = seed;
  j["em"] = em_config_to_json(cfg);
  echo_config(opt, "em", j);

  auto est = EstimatedAffinities::from_graph(inst.graph, x0);
  auto tr = run_em(inst.graph, est, init_mode, hash64(seed, 2), cfg);
  {
    auto out = open_out(opt, "trajectory.csv");
    write_trajectory_csv(out, tr);
  }
  json summary{{"final_strength", tr.final_estimates.strength},
               {"mean_degree", tr.final_estimates.mean_degree},
               {"em_steps", tr.bp_history.size()},
               {"termination", to_string(tr.termination)}};
  if (inst.planted) summary["overlap"] = overlap(tr.final_marginals, *inst.planted);
  if (opt.write_planted) {
    auto out = open_out(opt, "inferred.tsv");
    write_assignment(out, hard_assignment(tr.final_marginals));
  }
  write_json(opt, "summary.json", summary);
  return 0;
}

int cmd_sweep(const CommonOptions& opt) {
  json j = load_config(opt);
  auto cfg = SweepConfig::from_json(j);
  if (opt.seed) cfg.seed_base = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  echo_config(opt, "sweep", cfg.to_json());
  auto result = run_phase_sweep(cfg);
  {
    auto out = open_out(opt, "points.csv");
    write_sweep_points_csv(out, result);
  }
  {
    auto out = open_out(opt, "samples.csv");
    write_sweep_samples_csv(out, result);
  }
  write_json(opt, "summary.json", sweep_summary_json(result));
  return 0;
}

int cmd_trajectory(const CommonOptions& opt) {
  json j = load_config(opt);
  auto cfg = TrajectoryConfig::from_json(j);
  if (opt.seed) cfg.seeds = {*opt.seed};
  if (opt.threads) cfg.threads = *opt.threads;
  echo_config(opt, "trajectory", cfg.to_json());
  auto bundle = run_trajectory_experiment(cfg);
  json runs = json::array();
  for (std::size_t r = 0; r < bundle.runs.size(); ++r) {
    const auto& run = bundle.runs[r];
    const auto name = "trajectory_" + std::to_string(r) + ".csv";
    auto out = open_out(opt, name);
    write_trajectory_csv(out, run.trajectory);
    runs.push_back({{"file", name},
                    {"init", run.init},
                    {"seed", run.seed},
                    {"final_strength", run.trajectory.final_estimates.strength},
                    {"termination", to_string(run.trajectory.termination)},
                    {"overlap", run.overlap}});
  }
  json spectra = json::array();
  for (std::size_t s = 0; s < bundle.spectra.size(); ++s) {
    const auto& snap = bundle.spectra[s];
    const auto name = "spectrum_" + std::to_string(s) + ".csv";
    auto out = open_out(opt, name);
    write_spectrum_csv(out, snap.summary);
    json entry{{"file", name},
               {"strength", snap.strength},
               {"band_radius_analytic", snap.summary.band_radius_analytic},
               {"empirical_band_radius", snap.summary.empirical_band_radius},
               {"isolated", snap.summary.isolated}};
    if (snap.summary.iso_analytic) entry["iso_analytic"] = *snap.summary.iso_analytic;
    spectra.push_back(entry);
  }
  write_json(opt, "summary.json", {{"runs", runs}, {"spectra", spectra}});
  return 0;
}

int cmd_histogram(const CommonOptions& opt) {
  json j = load_config(opt);
  auto cfg = HistogramConfig::from_json(j);
  if (opt.seed) cfg.seed_base = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  echo_config(opt, "histogram", cfg.to_json());
  auto result = run_overlap_histogram(cfg);
  {
    auto out = open_out(opt, "histogram.csv");
    write_histogram_csv(out, result);
  }
  {
    auto out = open_out(opt, "histogram_medians.csv");
    write_histogram_medians_csv(out, result);
  }
  write_json(opt, "summary.json", sweep_summary_json(result.sweep));
  return 0;
}

int cmd_spectrum(const CommonOptions& opt) {
  json j = load_config(opt);
  const auto seed = seed_of(opt, j);
  if (opt.graph_in.empty() && !j.contains("num_vertices")) j["num_vertices"] = 500;
  auto inst = load_or_sample(opt, j, hash64(seed, 1));
  std::vector<double> estimates;
  if (j.contains("estimates")) estimates = j.at("estimates").get<std::vector<double>>();
  else if (inst.params) estimates = inst.params->strength;
  else throw UsageError("config needs \"estimates\" when the planted strengths are unknown");
  if (estimates.size() != inst.graph.num_labels())
    throw UsageError("\"estimates\" must have one entry per label");

  SpectrumOptions so;
  const auto mode = j.value("mode", std::string("dense"));
  if (mode == "krylov") so.mode = SpectrumMode::Krylov;
  else if (mode != "dense") throw UsageError("unknown spectrum mode: " + mode);
  so.num_eigenvalues = j.value("num_eigenvalues", so.num_eigenvalues);
  so.isolation_margin = j.value("isolation_margin", so.isolation_margin);
  so.seed = hash64(seed, 3);
  j["seed"] = seed;
  echo_config(opt, "spectrum", j);

  auto est = EstimatedAffinities::from_graph(inst.graph, estimates);
  NbOperator op(inst.graph, est);
  std::vector<double> planted_delta;
  if (inst.params) {
    const auto d = derive_affinities(*inst.params);
    for (const auto& la : d.per_label) planted_delta.push_back(la.delta);
  }
  auto summary = empirical_spectrum(op, est, so, planted_delta);
  {
    auto out = open_out(opt, "spectrum.csv");
    write_spectrum_csv(out, summary);
  }
  {
    auto out = open_out(opt, "spectrum.json");
    write_spectrum_json(out, summary);
  }
  return 0;
}

int cmd_verdict(const CommonOptions& opt) {
  json j = load_config(opt);
  auto params = params_from(j);
  const auto v = phase_verdict(params);
  const auto kp = known_param_threshold(params);
  const auto em = em_threshold(params);
  json out{{"known_param", {{"lhs", kp.lhs}, {"rhs", kp.rhs}, {"detectable", kp.detectable}}},
           {"em", {{"lhs", em.strength_form.lhs},
                   {"rhs", em.strength_form.rhs},
                   {"detectable", em.detectable()}}},
           {"per_label_alone_detectable", v.per_label_alone_detectable},
           {"per_label_margins", v.per_label_margins},
           {"infeasible", v.infeasible}};
  echo_config(opt, "verdict", j);
  write_json(opt, "verdict.json", out);
  std::cout << out.dump() << '\n';
  return 0;
}

void emit_error(const std::string& command, const std::string& kind, const std::string& what) {
  json err{{"error", {{"command", command}, {"type", kind}, {"message", what}}}};
  std::cerr << err.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Labeled stochastic block model: sampling, EM inference and spectra"};
  app.require_subcommand(1);
  CommonOptions opt;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON configuration file");
    sub->add_option("--seed", seed, "Base seed (overrides the config)");
    sub->add_option("--out-dir", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (0: all cores)");
    sub->add_option("--graph-in", opt.graph_in, "Read the graph from an edge-list file");
    sub->add_flag("--write-planted", opt.write_planted, "Also write module assignments");
  };

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const CommonOptions&);
  };
  const Command commands[] = {
      {"sample", "Draw a labeled SBM graph", cmd_sample},
      {"em", "Run EM with BP on one graph", cmd_em},
      {"sweep", "Overlap over a grid of planted strengths", cmd_sweep},
      {"trajectory", "EM trajectories and spectra snapshots", cmd_trajectory},
      {"histogram", "Overlap distribution across a degree sweep", cmd_histogram},
      {"spectrum", "Eigenvalues of the weighted non-backtracking operator", cmd_spectrum},
      {"verdict", "Evaluate the detectability thresholds", cmd_verdict},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.push_back(sub);
  }

  std::string active = "lsbm";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(active, "usage", e.what());
    return 2;
  }

  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    active = commands[k].name;
    if (subs[k]->count("--seed")) opt.seed = seed;
    if (subs[k]->count("--threads")) opt.threads = threads;
    try {
      return commands[k].run(opt);
    } catch (const UsageError& e) {
      emit_error(active, "usage", e.what());
      return 2;
    } catch (const json::exception& e) {
      emit_error(active, "config", e.what());
      return 2;
    } catch (const std::invalid_argument& e) {
      emit_error(active, "invalid_argument", e.what());
      return 3;
    } catch (const std::exception& e) {
      emit_error(active, "runtime", e.what());
      return 1;
    }
  }
  return 0;
}

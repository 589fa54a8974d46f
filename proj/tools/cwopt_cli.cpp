// cwopt: consensus weight design experiments from the command line.
//
//   cwopt generate   --config cfg.json --out dir
//   cwopt optimize   --config cfg.json --scheme phi:30 --out dir
//   cwopt simulate   --config cfg.json --weights w.txt --out dir
//   cwopt experiment --config cfg.json --out dir
//   cwopt report     --trajectory mw=a.csv --trajectory phi:1=b.csv --out dir
//
// Everything goes through the C API in cwopt/cwopt.h.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cwopt/cwopt.h"

namespace {

// 120-node random-network study, used when --config is omitted.
constexpr const char* kDefaultConfig = R"({
  "graph": {"source": "generate", "nodes": 120, "edges": 449, "c1": 0.6, "c2": 0.2},
  "network": "random",
  "schemes": ["metropolis", "sgbw", "phi:1", "phi:30"],
  "horizon": 100,
  "trials": 100,
  "seed": 1
})";

struct CliError {
  cwopt_status status;
};

void check(cwopt_status s) {
  if (s != CWOPT_OK) throw CliError{s};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Graph = std::unique_ptr<cwopt_graph, Deleter<cwopt_graph, cwopt_graph_free>>;
using Model = std::unique_ptr<cwopt_model, Deleter<cwopt_model, cwopt_model_free>>;
using Weights = std::unique_ptr<cwopt_weights, Deleter<cwopt_weights, cwopt_weights_free>>;
using Sampler = std::unique_ptr<cwopt_sampler, Deleter<cwopt_sampler, cwopt_sampler_free>>;
using Trajectory = std::unique_ptr<cwopt_trajectory, Deleter<cwopt_trajectory, cwopt_trajectory_free>>;
using Result = std::unique_ptr<cwopt_result, Deleter<cwopt_result, cwopt_result_free>>;
using Config = std::unique_ptr<cwopt_config, Deleter<cwopt_config, cwopt_config_free>>;

struct CommonOptions {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t trials = 0;
  int horizon = 0;
};

Config load_config(const CommonOptions& opts) {
  cwopt_config* raw = nullptr;
  if (opts.config.empty()) {
    check(cwopt_config_parse(kDefaultConfig, &raw));
  } else {
    check(cwopt_config_load(opts.config.c_str(), &raw));
  }
  Config cfg(raw);
  if (opts.seed_set) cwopt_config_set_seed(cfg.get(), opts.seed);
  if (opts.trials > 0) check(cwopt_config_set_trials(cfg.get(), opts.trials));
  if (opts.horizon > 0) check(cwopt_config_set_horizon(cfg.get(), opts.horizon));
  check(cwopt_config_set_output_dir(cfg.get(), opts.out.c_str()));
  return cfg;
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string scheme_tag(std::string scheme) {
  const auto colon = scheme.find(':');
  if (colon != std::string::npos) scheme.erase(colon, 1);
  return scheme;
}

void build_network(const cwopt_config* cfg, Graph& graph, Model& model) {
  cwopt_graph* g = nullptr;
  cwopt_model* m = nullptr;
  check(cwopt_config_build_network(cfg, &g, &m));
  graph.reset(g);
  model.reset(m);
}

int cmd_generate(const CommonOptions& opts) {
  auto cfg = load_config(opts);
  Graph graph;
  Model model;
  build_network(cfg.get(), graph, model);
  std::filesystem::create_directories(opts.out);
  check(cwopt_network_save(graph.get(), model.get(), path_in(opts.out, "graph.txt").c_str(),
                           path_in(opts.out, "correlations.txt").c_str()));
  cwopt_validity v{};
  check(cwopt_model_validate(model.get(), 10000, 0, &v));
  std::printf("nodes %d edges %zu connected %s\n", cwopt_graph_num_nodes(graph.get()),
              cwopt_graph_num_edges(graph.get()), cwopt_graph_is_connected(graph.get()) ? "yes" : "no");
  std::printf("psd %s min_eigenvalue %.6g cauchy_schwarz_violations %zu", v.psd ? "yes" : "no", v.min_eigenvalue,
              v.cauchy_schwarz_violations);
  if (v.clamp_probed) std::printf(" clamp_fraction %.6g", v.clamp_fraction);
  std::printf("\n");
  return 0;
}

int cmd_optimize(const CommonOptions& opts, const std::string& scheme) {
  auto cfg = load_config(opts);
  Graph graph;
  Model model;
  build_network(cfg.get(), graph, model);
  cwopt_weights* w = nullptr;
  cwopt_result* r = nullptr;
  check(cwopt_config_scheme_weights(cfg.get(), graph.get(), model.get(), scheme.c_str(), &w, &r));
  Weights weights(w);
  Result result(r);
  std::filesystem::create_directories(opts.out);
  const std::string tag = scheme_tag(scheme);
  check(cwopt_weights_save(weights.get(), path_in(opts.out, "weights_" + tag + ".txt").c_str()));
  if (result) {
    check(cwopt_result_save_trace(result.get(), path_in(opts.out, "trace_" + tag + ".csv").c_str()));
    std::printf("%s best %.12g after %d iterations\n", scheme.c_str(), cwopt_result_best_value(result.get()),
                cwopt_result_iterations(result.get()));
  }
  Model sim_model;
  if (cwopt_config_is_static(cfg.get())) {
    cwopt_model* m = nullptr;
    check(cwopt_model_deterministic(graph.get(), &m));
    sim_model.reset(m);
  }
  cwopt_rates rates{};
  check(cwopt_rates_compute(weights.get(), graph.get(), sim_model ? sim_model.get() : model.get(), &rates));
  std::printf("phi1 %.12g r_as %.12g ms_bound %.12g feasible %s\n", rates.phi1, rates.r_as, rates.ms_bound,
              rates.feasible ? "yes" : "no");
  return 0;
}

int cmd_simulate(const CommonOptions& opts, const std::string& weights_path, unsigned workers) {
  auto cfg = load_config(opts);
  Graph graph;
  Model model;
  build_network(cfg.get(), graph, model);
  if (cwopt_config_is_static(cfg.get())) {
    cwopt_model* m = nullptr;
    check(cwopt_model_deterministic(graph.get(), &m));
    model.reset(m);
  }
  cwopt_weights* w = nullptr;
  check(cwopt_weights_load(weights_path.c_str(), &w));
  Weights weights(w);
  cwopt_sampler* s = nullptr;
  check(cwopt_sampler_create(model.get(), &s));
  Sampler sampler(s);

  const std::size_t trials = cwopt_config_trials(cfg.get());
  const int horizon = cwopt_config_horizon(cfg.get());
  const std::uint64_t seed = cwopt_config_seed(cfg.get());
  if (workers == 0) workers = cwopt_config_workers(cfg.get());
  cwopt_trajectory* t = nullptr;
  check(cwopt_simulate(weights.get(), sampler.get(), graph.get(), horizon, trials, seed, workers, &t));
  Trajectory traj(t);
  std::filesystem::create_directories(opts.out);
  const std::string out = path_in(opts.out, "trajectory.csv");
  check(cwopt_trajectory_save(traj.get(), out.c_str()));
  std::printf("wrote %s (%zu rows, clamp fraction %.6g)\n", out.c_str(), cwopt_trajectory_length(traj.get()),
              cwopt_trajectory_clamp_fraction(traj.get()));
  return 0;
}

int cmd_experiment(const CommonOptions& opts, const std::vector<std::string>& schemes) {
  auto cfg = load_config(opts);
  if (schemes.size() == 1) check(cwopt_config_set_scheme(cfg.get(), schemes.front().c_str()));
  const char* report = nullptr;
  check(cwopt_run_experiment(cfg.get(), &report));
  std::fputs(report, stdout);
  return 0;
}

int cmd_report(const CommonOptions& opts, const std::vector<std::string>& specs,
               const std::vector<double>& thresholds) {
  std::vector<std::string> names;
  std::vector<Trajectory> owned;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw CLI::ValidationError("--trajectory", "expected name=path, got \"" + spec + "\"");
    names.push_back(spec.substr(0, eq));
    cwopt_trajectory* t = nullptr;
    check(cwopt_trajectory_load(spec.substr(eq + 1).c_str(), &t));
    owned.emplace_back(t);
  }
  std::vector<const char*> name_ptrs;
  std::vector<const cwopt_trajectory*> traj_ptrs;
  for (std::size_t k = 0; k < names.size(); ++k) {
    name_ptrs.push_back(names[k].c_str());
    traj_ptrs.push_back(owned[k].get());
  }
  std::filesystem::create_directories(opts.out);
  const char* text = nullptr;
  check(cwopt_compare(name_ptrs.data(), traj_ptrs.data(), names.size(), thresholds.data(), thresholds.size(),
                      path_in(opts.out, "summary.csv").c_str(), path_in(opts.out, "crossings.csv").c_str(), &text));
  std::fputs(text, stdout);
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_sim_flags) {
  cmd->add_option("--config", opts.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&opts](const std::uint64_t& s) {
        opts.seed = s;
        opts.seed_set = true;
      },
      "Master seed (u64)");
  if (with_sim_flags) {
    cmd->add_option("--trials", opts.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    cmd->add_option("--horizon", opts.horizon, "Consensus iterations K")->check(CLI::PositiveNumber);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus weight design for random networks with correlated link failures"};
  app.require_subcommand(1);

  CommonOptions gen_opts, opt_opts, sim_opts, exp_opts, rep_opts;
  std::string scheme;
  std::string weights_path;
  unsigned workers = 0;
  std::vector<std::string> exp_schemes;
  std::vector<std::string> trajectories;
  std::vector<double> thresholds{1e-2, 1e-3};

  auto* gen = app.add_subcommand("generate", "Generate graph and link model files");
  add_common(gen, gen_opts, false);

  auto* opt = app.add_subcommand("optimize", "Compute weights for one scheme");
  add_common(opt, opt_opts, false);
  opt->add_option("--scheme", scheme, "metropolis | sgbw | phi:<n> | psi:<n>")->required();

  auto* sim = app.add_subcommand("simulate", "Monte Carlo trajectory for given weights");
  add_common(sim, sim_opts, true);
  sim->add_option("--weights", weights_path, "Weight file")->required()->check(CLI::ExistingFile);
  sim->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("experiment", "Full pipeline: optimize, simulate, compare");
  add_common(exp, exp_opts, true);
  exp->add_option("--scheme", exp_schemes, "Restrict to a single scheme")->expected(1);

  auto* rep = app.add_subcommand("report", "Threshold and crossing tables from trajectory CSVs");
  rep->add_option("--out", rep_opts.out, "Output directory");
  rep->add_option("--trajectory", trajectories, "name=path (repeatable)")->required();
  rep->add_option("--threshold", thresholds, "Relative MSE thresholds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(gen_opts);
    if (*opt) return cmd_optimize(opt_opts, scheme);
    if (*sim) return cmd_simulate(sim_opts, weights_path, workers);
    if (*exp) return cmd_experiment(exp_opts, exp_schemes);
    if (*rep) return cmd_report(rep_opts, trajectories, thresholds);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s: %s\n", cwopt_status_name(e.status), cwopt_last_error());
    return static_cast<int>(e.status);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }
  return 1;
}

#include "cwopt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cwopt/error.hpp"
#include "cwopt/io.hpp"
#include "cwopt/spectrum.hpp"

namespace cwopt {

namespace {

using nlohmann::json;

std::string step_rule_name(StepRule r) {
  switch (r) {
    case StepRule::Constant: return "constant";
    case StepRule::InvSqrt: return "inv_sqrt";
    case StepRule::Inv: return "inv";
  }
  return "inv_sqrt";
}

StepRule parse_step_rule(const std::string& s) {
  if (s == "constant") return StepRule::Constant;
  if (s == "inv_sqrt") return StepRule::InvSqrt;
  if (s == "inv") return StepRule::Inv;
  fail(ErrorCode::Parse, "unknown step rule \"" + s + "\" (constant | inv_sqrt | inv)");
}

std::string step_scaling_name(StepScaling s) {
  switch (s) {
    case StepScaling::Raw: return "raw";
    case StepScaling::Initial: return "initial";
    case StepScaling::Every: return "every";
  }
  return "every";
}

StepScaling parse_step_scaling(const std::string& s) {
  if (s == "raw") return StepScaling::Raw;
  if (s == "initial") return StepScaling::Initial;
  if (s == "every") return StepScaling::Every;
  fail(ErrorCode::Parse, "unknown step scaling \"" + s + "\" (raw | initial | every)");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("config field \"") + key + "\": " + e.what());
  }
}

}  // namespace

std::string SchemeSpec::name() const {
  switch (kind) {
    case SchemeKind::Metropolis: return "metropolis";
    case SchemeKind::Sgbw: return "sgbw";
    case SchemeKind::Phi: return "phi:" + std::to_string(n);
    case SchemeKind::Psi: return "psi:" + std::to_string(n);
  }
  return {};
}

std::string SchemeSpec::tag() const {
  switch (kind) {
    case SchemeKind::Phi: return "phi" + std::to_string(n);
    case SchemeKind::Psi: return "psi" + std::to_string(n);
    default: return name();
  }
}

SchemeSpec parse_scheme(const std::string& text) {
  if (text == "metropolis" || text == "mw") return {SchemeKind::Metropolis, 0};
  if (text == "sgbw") return {SchemeKind::Sgbw, 0};
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    int n = 0;
    std::size_t used = 0;
    try {
      n = std::stoi(tail, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == tail.size() && used > 0 && n >= 1) {
      if (head == "phi") return {SchemeKind::Phi, n};
      if (head == "psi") return {SchemeKind::Psi, n};
    }
  }
  fail(ErrorCode::Parse, "unknown scheme \"" + text + "\" (metropolis | sgbw | phi:<n> | psi:<n>)");
}

void ExperimentConfig::validate(int n_nodes) const {
  require(!schemes.empty(), "at least one weight scheme required");
  require(horizon >= 1, "horizon K must be at least 1");
  require(n_trials >= 1, "trials must be at least 1");
  require(!thresholds.empty(), "at least one threshold required");
  for (double t : thresholds) require(t > 0.0 && std::isfinite(t), "thresholds must be positive");
  schedule.validate();
  if (!graph.load) {
    require(graph.n_nodes >= 2, "graph needs at least two nodes");
    require(graph.c1 >= 0.0 && graph.c1 < 1.0, "c1 must lie in [0,1)");
    require(graph.c2 >= 0.0 && graph.c2 < 1.0, "c2 must lie in [0,1)");
    require(graph.max_attempts >= 1, "max_attempts must be at least 1");
  } else {
    require(!graph.graph_file.empty(), "graph_file required when loading a network");
  }
  const int nodes = n_nodes > 0 ? n_nodes : (graph.load ? 0 : graph.n_nodes);
  if (nodes > 0) {
    for (const auto& s : schemes)
      if (s.kind == SchemeKind::Phi || s.kind == SchemeKind::Psi)
        require(s.n >= 1 && s.n <= nodes - 1, "scheme " + s.name() + ": index must lie in 1..N-1");
  }
}

json to_json(const ExperimentConfig& c) {
  json graph;
  if (c.graph.load) {
    graph = {{"source", "load"}, {"graph_file", c.graph.graph_file}, {"correlation_file", c.graph.correlation_file}};
  } else {
    graph = {{"source", "generate"}, {"nodes", c.graph.n_nodes},   {"edges", c.graph.target_edges},
             {"c1", c.graph.c1},     {"c2", c.graph.c2},           {"max_attempts", c.graph.max_attempts}};
  }
  json schemes = json::array();
  for (const auto& s : c.schemes) schemes.push_back(s.name());
  json schedule = {{"step_rule", step_rule_name(c.schedule.step_rule)},
                   {"a", c.schedule.a},
                   {"step_scaling", step_scaling_name(c.schedule.scaling)},
                   {"max_iters", c.schedule.max_iters},
                   {"feasibility_margin", c.schedule.feasibility_margin},
                   {"target_gap", c.schedule.target_gap ? json(*c.schedule.target_gap) : json(nullptr)},
                   {"gap_window", c.schedule.gap_window}};
  return {{"graph", graph},
          {"network", c.static_network ? "static" : "random"},
          {"schemes", schemes},
          {"horizon", c.horizon},
          {"trials", c.n_trials},
          {"seed", c.seed},
          {"schedule", schedule},
          {"thresholds", c.thresholds},
          {"probe_samples", c.probe_samples},
          {"workers", c.workers},
          {"output_dir", c.output_dir}};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::Parse, "config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("graph")) {
    const json& g = j.at("graph");
    const auto source = get_or<std::string>(g, "source", "generate");
    if (source == "load") {
      c.graph.load = true;
      c.graph.graph_file = get_or<std::string>(g, "graph_file", "");
      c.graph.correlation_file = get_or<std::string>(g, "correlation_file", "");
    } else if (source == "generate") {
      c.graph.n_nodes = get_or<int>(g, "nodes", c.graph.n_nodes);
      c.graph.target_edges = get_or<std::size_t>(g, "edges", c.graph.target_edges);
      c.graph.c1 = get_or<double>(g, "c1", c.graph.c1);
      c.graph.c2 = get_or<double>(g, "c2", c.graph.c2);
      c.graph.max_attempts = get_or<int>(g, "max_attempts", c.graph.max_attempts);
    } else {
      fail(ErrorCode::Parse, "graph.source must be \"generate\" or \"load\"");
    }
  }
  const auto network = get_or<std::string>(j, "network", "random");
  if (network != "random" && network != "static") fail(ErrorCode::Parse, "network must be \"random\" or \"static\"");
  c.static_network = network == "static";
  if (j.contains("schemes")) {
    if (!j.at("schemes").is_array()) fail(ErrorCode::Parse, "schemes must be an array of names");
    for (const auto& s : j.at("schemes")) {
      if (!s.is_string()) fail(ErrorCode::Parse, "scheme names must be strings");
      c.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
  }
  c.horizon = get_or<int>(j, "horizon", c.horizon);
  c.n_trials = get_or<std::size_t>(j, "trials", c.n_trials);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    c.schedule.step_rule = parse_step_rule(get_or<std::string>(s, "step_rule", step_rule_name(c.schedule.step_rule)));
    c.schedule.a = get_or<double>(s, "a", c.schedule.a);
    c.schedule.scaling =
        parse_step_scaling(get_or<std::string>(s, "step_scaling", step_scaling_name(c.schedule.scaling)));
    c.schedule.max_iters = get_or<int>(s, "max_iters", c.schedule.max_iters);
    c.schedule.feasibility_margin = get_or<double>(s, "feasibility_margin", c.schedule.feasibility_margin);
    if (s.contains("target_gap") && !s.at("target_gap").is_null())
      c.schedule.target_gap = get_or<double>(s, "target_gap", 0.0);
    c.schedule.gap_window = get_or<int>(s, "gap_window", c.schedule.gap_window);
  }
  c.thresholds = get_or<std::vector<double>>(j, "thresholds", c.thresholds);
  c.probe_samples = get_or<std::size_t>(j, "probe_samples", c.probe_samples);
  c.workers = get_or<unsigned>(j, "workers", c.workers);
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, "config " + path.string() + ": " + e.what());
  }
  auto config = config_from_json(j);
  // Relative network file paths resolve against the config's directory.
  if (config.graph.load) {
    const auto base = path.parent_path();
    auto resolve = [&](std::string& p) {
      if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
    };
    resolve(config.graph.graph_file);
    resolve(config.graph.correlation_file);
  }
  return config;
}

Network build_network(const ExperimentConfig& config) {
  if (config.graph.load) {
    auto files = io::load_network(config.graph.graph_file, config.graph.correlation_file);
    return {std::move(files.graph), std::move(files.model)};
  }
  Rng rng = derive_stream(config.seed, Stream::Graph);
  EdgeCountOptions opts;
  opts.max_attempts = config.graph.max_attempts;
  auto geo = generate_with_edge_count(config.graph.n_nodes, config.graph.target_edges, rng, opts);
  const double radius = *geo.graph.radius();
  const auto probs = assign_probabilities(geo.graph, config.graph.c1, radius);
  auto model = build_correlations(geo.graph, probs, config.graph.c2, config.graph.c1);
  return {std::move(geo.graph), std::move(model)};
}

std::optional<int> iterations_to_threshold(const std::vector<double>& mse, double threshold) {
  if (mse.empty()) return std::nullopt;
  const double base = mse[0];
  for (std::size_t k = 0; k < mse.size(); ++k) {
    if (base == 0.0 ? mse[k] == 0.0 : mse[k] / base <= threshold) return static_cast<int>(k);
  }
  return std::nullopt;
}

std::optional<int> first_crossing(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t len = std::min(a.size(), b.size());
  int order = 0;
  for (std::size_t k = 0; k < len; ++k) {
    const int s = a[k] < b[k] ? -1 : (a[k] > b[k] ? 1 : 0);
    if (s == 0) continue;
    if (order == 0) {
      order = s;
    } else if (s != order) {
      return static_cast<int>(k);
    }
  }
  return std::nullopt;
}

std::optional<int> ComparisonTable::iterations_for(const std::string& scheme, double threshold) const {
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    if (schemes[s] != scheme) continue;
    for (std::size_t t = 0; t < thresholds.size(); ++t)
      if (thresholds[t] == threshold) return iterations[s][t];
  }
  fail(ErrorCode::InvalidArgument, "no table entry for scheme " + scheme);
}

ComparisonTable compare_report(const std::vector<std::pair<std::string, ErrorTrajectory>>& trajectories,
                               const std::vector<double>& thresholds) {
  ComparisonTable table;
  table.thresholds = thresholds;
  for (const auto& [name, traj] : trajectories) {
    table.schemes.push_back(name);
    auto& row = table.iterations.emplace_back();
    for (double t : thresholds) row.push_back(iterations_to_threshold(traj.mse, t));
  }
  for (std::size_t a = 0; a < trajectories.size(); ++a)
    for (std::size_t b = a + 1; b < trajectories.size(); ++b)
      table.crossings.push_back({trajectories[a].first, trajectories[b].first,
                                 first_crossing(trajectories[a].second.mse, trajectories[b].second.mse)});
  return table;
}

std::string summary_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "scheme,threshold,iterations\n";
  for (std::size_t s = 0; s < table.schemes.size(); ++s)
    for (std::size_t t = 0; t < table.thresholds.size(); ++t) {
      out << table.schemes[s] << ',' << io::format_double(table.thresholds[t]) << ',';
      if (table.iterations[s][t]) {
        out << *table.iterations[s][t];
      } else {
        out << "not reached";
      }
      out << '\n';
    }
  return out.str();
}

std::string crossings_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "scheme_a,scheme_b,crossing\n";
  for (const auto& c : table.crossings) {
    out << c.a << ',' << c.b << ',';
    if (c.k) {
      out << *c.k;
    } else {
      out << "none";
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string format_report(const ExperimentReport& r) {
  std::ostringstream out;
  const auto& g = r.network.graph;
  out << "network: N=" << g.num_nodes() << " M=" << g.num_edges()
      << " connected=" << (g.is_connected() ? "yes" : "no") << " mode=" << (r.config.static_network ? "static" : "random")
      << '\n';
  if (g.radius()) out << "radius: " << io::format_double(*g.radius()) << '\n';
  out << "model: psd=" << (r.validity.psd ? "yes" : "no") << " min_eigenvalue=" << io::format_double(r.validity.min_eigenvalue)
      << " cauchy_schwarz_violations=" << r.validity.cauchy_schwarz_violations;
  if (r.validity.clamp_fraction)
    out << " probe_clamp_fraction=" << io::format_double(*r.validity.clamp_fraction) << " (" << r.validity.probe_samples
        << " draws)";
  out << '\n';
  out << "horizon=" << r.config.horizon << " trials=" << r.config.n_trials << " seed=" << r.config.seed << "\n\n";

  out << "scheme,phi1,r_as,iterations_used,simulation_clamp_fraction\n";
  for (const auto& o : r.outcomes) {
    out << o.scheme.name() << ',' << io::format_double(o.phi1) << ',' << io::format_double(o.r_as) << ','
        << (o.optimization ? std::to_string(o.optimization->iterations_used) : std::string("-")) << ','
        << io::format_double(o.trajectory.clamps.fraction());
    if (o.trajectory.clamps.fraction() > 0.01) out << " moment-inexact";
    out << '\n';
  }
  if (std::any_of(r.outcomes.begin(), r.outcomes.end(),
                  [](const SchemeOutcome& o) { return o.scheme.kind == SchemeKind::Sgbw; }))
    out << "note: sgbw = static-optimal (psi_1) weights on the supergraph, a stand-in for the supergraph-based rule\n";
  out << '\n' << summary_csv(r.table) << '\n' << crossings_csv(r.table);
  return out.str();
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.network = build_network(config);
  const auto& graph = report.network.graph;
  config.validate(graph.num_nodes());
  if (!graph.is_connected()) fail(ErrorCode::Disconnected, "experiment network is disconnected");

  const LinkStatModel sim_model =
      config.static_network ? LinkStatModel::deterministic(graph.num_edges()) : report.network.model;
  report.validity = validate_model(sim_model, config.probe_samples, config.seed);
  if (!report.validity.psd)
    fail(ErrorCode::NotPositiveSemidefinite, "link covariance matrix is not positive semidefinite; reduce c2");
  const TopologySampler sampler = build_sampler(sim_model);

  std::vector<std::pair<std::string, ErrorTrajectory>> trajectories;
  for (const auto& scheme : config.schemes) {
    SchemeOutcome outcome;
    outcome.scheme = scheme;
    switch (scheme.kind) {
      case SchemeKind::Metropolis:
        outcome.weights = metropolis_weights(graph);
        break;
      case SchemeKind::Sgbw:
        outcome.weights = sgbw_weights(graph, config.schedule);
        break;
      case SchemeKind::Phi:
      case SchemeKind::Psi: {
        const Objective obj{scheme.kind == SchemeKind::Psi ? ObjectiveKind::Psi : ObjectiveKind::Phi, scheme.n};
        const LinkStatModel& opt_model =
            obj.kind == ObjectiveKind::Psi ? LinkStatModel::deterministic(graph.num_edges()) : sim_model;
        const auto init = feasible_start(graph, opt_model, config.schedule.feasibility_margin);
        outcome.optimization = optimize(obj, graph, opt_model, init, config.schedule);
        outcome.weights = outcome.optimization->best_weights;
        break;
      }
    }
    outcome.spectrum = sym_eig(error_moment_matrix(outcome.weights, sim_model, graph).m).eigenvalues;
    const auto rate = rates(outcome.weights, graph, sim_model);
    outcome.phi1 = rate.phi1;
    outcome.r_as = rate.r_as;
    outcome.trajectory =
        monte_carlo_mse(outcome.weights, sampler, graph, config.horizon, config.n_trials, config.seed, config.workers);
    trajectories.emplace_back(scheme.name(), outcome.trajectory);
    report.outcomes.push_back(std::move(outcome));
  }
  report.table = compare_report(trajectories, config.thresholds);
  report.report_text = format_report(report);

  if (!config.output_dir.empty()) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    io::write_text(dir / "config.json", to_json(config).dump(2) + "\n");
    io::save_network(dir / "graph.txt", dir / "correlations.txt", graph, report.network.model);
    for (const auto& o : report.outcomes) {
      const std::string tag = o.scheme.tag();
      io::save_weights(dir / ("weights_" + tag + ".txt"), o.weights);
      std::ostringstream spec, traj;
      io::write_spectrum(spec, o.spectrum);
      io::write_text(dir / ("spectrum_" + tag + ".csv"), spec.str());
      io::write_trajectory(traj, o.trajectory);
      io::write_text(dir / ("trajectory_" + tag + ".csv"), traj.str());
      if (o.optimization) {
        std::ostringstream tr;
        io::write_trace(tr, o.optimization->trace);
        io::write_text(dir / ("trace_" + tag + ".csv"), tr.str());
      }
    }
    io::write_text(dir / "summary.csv", summary_csv(report.table));
    io::write_text(dir / "crossings.csv", crossings_csv(report.table));
    io::write_text(dir / "report.txt", report.report_text);
  }
  return report;
}

}  // namespace cwopt

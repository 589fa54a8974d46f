#include "cwopt/cwopt.h"

#include <algorithm>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "cwopt/error.hpp"
#include "cwopt/experiment.hpp"
#include "cwopt/io.hpp"
#include "cwopt/moments.hpp"
#include "cwopt/netsim.hpp"
#include "cwopt/optimizer.hpp"
#include "cwopt/spectrum.hpp"
#include "cwopt/supergraph.hpp"

struct cwopt_graph {
  cwopt::Supergraph value;
};
struct cwopt_model {
  cwopt::LinkStatModel value;
};
struct cwopt_weights {
  cwopt::WeightVector value;
};
struct cwopt_sampler {
  cwopt::TopologySampler value;
};
struct cwopt_trajectory {
  cwopt::ErrorTrajectory value;
};
struct cwopt_result {
  cwopt::OptimizationResult value;
  bool feasible = true;
};
struct cwopt_config {
  cwopt::ExperimentConfig value;
};

namespace {

thread_local std::string last_error;
thread_local std::string returned_text;

cwopt_status map_code(cwopt::ErrorCode code) {
  using cwopt::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return CWOPT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Disconnected: return CWOPT_ERR_DISCONNECTED;
    case ErrorCode::MissingCoordinates: return CWOPT_ERR_MISSING_COORDINATES;
    case ErrorCode::NotPositiveSemidefinite: return CWOPT_ERR_NOT_PSD;
    case ErrorCode::NotSymmetric: return CWOPT_ERR_NOT_SYMMETRIC;
    case ErrorCode::Infeasible: return CWOPT_ERR_INFEASIBLE;
    case ErrorCode::Io: return CWOPT_ERR_IO;
    case ErrorCode::Parse: return CWOPT_ERR_PARSE;
  }
  return CWOPT_ERR_INTERNAL;
}

template <typename F>
cwopt_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return CWOPT_OK;
  } catch (const cwopt::Error& e) {
    last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return CWOPT_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CWOPT_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) cwopt::fail(cwopt::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

cwopt::SubgradientSchedule to_schedule(const cwopt_schedule* s) {
  cwopt::SubgradientSchedule out;
  if (!s) return out;
  switch (s->step_rule) {
    case CWOPT_STEP_CONSTANT: out.step_rule = cwopt::StepRule::Constant; break;
    case CWOPT_STEP_INV_SQRT: out.step_rule = cwopt::StepRule::InvSqrt; break;
    case CWOPT_STEP_INV: out.step_rule = cwopt::StepRule::Inv; break;
    default: cwopt::fail(cwopt::ErrorCode::InvalidArgument, "unknown step rule");
  }
  out.a = s->a;
  switch (s->scaling) {
    case CWOPT_SCALE_RAW: out.scaling = cwopt::StepScaling::Raw; break;
    case CWOPT_SCALE_INITIAL: out.scaling = cwopt::StepScaling::Initial; break;
    case CWOPT_SCALE_EVERY: out.scaling = cwopt::StepScaling::Every; break;
    default: cwopt::fail(cwopt::ErrorCode::InvalidArgument, "unknown step scaling");
  }
  out.max_iters = s->max_iters;
  out.feasibility_margin = s->feasibility_margin;
  if (s->target_gap >= 0.0) out.target_gap = s->target_gap;
  out.gap_window = s->gap_window;
  return out;
}

}  // namespace

extern "C" {

const char* cwopt_last_error(void) { return last_error.c_str(); }

const char* cwopt_status_name(cwopt_status status) {
  switch (status) {
    case CWOPT_OK: return "ok";
    case CWOPT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CWOPT_ERR_DISCONNECTED: return "disconnected graph";
    case CWOPT_ERR_MISSING_COORDINATES: return "missing coordinates";
    case CWOPT_ERR_NOT_PSD: return "covariance not positive semidefinite";
    case CWOPT_ERR_NOT_SYMMETRIC: return "matrix not symmetric";
    case CWOPT_ERR_INFEASIBLE: return "infeasible";
    case CWOPT_ERR_IO: return "i/o error";
    case CWOPT_ERR_PARSE: return "parse error";
    case CWOPT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

// ---- supergraph -------------------------------------------------------------

cwopt_status cwopt_graph_generate_geometric(int n_nodes, double radius, uint64_t seed, cwopt_graph** out,
                                            int* connected) {
  return guarded([&] {
    need(out, "out");
    auto rng = cwopt::derive_stream(seed, cwopt::Stream::Graph);
    auto geo = cwopt::generate_geometric(n_nodes, radius, rng);
    if (connected) *connected = geo.connected ? 1 : 0;
    *out = new cwopt_graph{std::move(geo.graph)};
  });
}

cwopt_status cwopt_graph_generate_with_edges(int n_nodes, size_t target_edges, uint64_t seed, int max_attempts,
                                             cwopt_graph** out) {
  return guarded([&] {
    need(out, "out");
    auto rng = cwopt::derive_stream(seed, cwopt::Stream::Graph);
    cwopt::EdgeCountOptions opts;
    if (max_attempts > 0) opts.max_attempts = max_attempts;
    auto geo = cwopt::generate_with_edge_count(n_nodes, target_edges, rng, opts);
    *out = new cwopt_graph{std::move(geo.graph)};
  });
}

cwopt_status cwopt_graph_from_points(const double* xy, int n_nodes, double radius, cwopt_graph** out,
                                     int* connected) {
  return guarded([&] {
    need(xy, "xy");
    need(out, "out");
    cwopt::require(n_nodes >= 2, "geometric graph needs at least two nodes");
    std::vector<cwopt::Point> pts(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) pts[static_cast<std::size_t>(i)] = {xy[2 * i], xy[2 * i + 1]};
    auto geo = cwopt::geometric_from_points(std::move(pts), radius);
    if (connected) *connected = geo.connected ? 1 : 0;
    *out = new cwopt_graph{std::move(geo.graph)};
  });
}

cwopt_status cwopt_graph_from_edges(int n_nodes, const int* endpoints, size_t n_edges, cwopt_graph** out) {
  return guarded([&] {
    need(out, "out");
    if (n_edges > 0) need(endpoints, "endpoints");
    std::vector<cwopt::Edge> edges;
    for (size_t k = 0; k < n_edges; ++k) edges.push_back({endpoints[2 * k], endpoints[2 * k + 1]});
    *out = new cwopt_graph{cwopt::Supergraph(n_nodes, std::move(edges))};
  });
}

void cwopt_graph_free(cwopt_graph* graph) { delete graph; }
int cwopt_graph_num_nodes(const cwopt_graph* graph) { return graph ? graph->value.num_nodes() : 0; }
size_t cwopt_graph_num_edges(const cwopt_graph* graph) { return graph ? graph->value.num_edges() : 0; }

cwopt_status cwopt_graph_edge(const cwopt_graph* graph, size_t e, int* i, int* j) {
  return guarded([&] {
    need(graph, "graph");
    cwopt::require(e < graph->value.num_edges(), "edge index out of range");
    const auto& edge = graph->value.edge(e);
    if (i) *i = edge.i;
    if (j) *j = edge.j;
  });
}

int cwopt_graph_is_connected(const cwopt_graph* graph) { return graph && graph->value.is_connected() ? 1 : 0; }

cwopt_status cwopt_graph_radius(const cwopt_graph* graph, double* radius) {
  return guarded([&] {
    need(graph, "graph");
    need(radius, "radius");
    if (!graph->value.radius()) cwopt::fail(cwopt::ErrorCode::MissingCoordinates, "graph has no generation radius");
    *radius = *graph->value.radius();
  });
}

// ---- model ------------------------------------------------------------------

cwopt_status cwopt_model_geometric(const cwopt_graph* graph, double c1, double c2, cwopt_model** out) {
  return guarded([&] {
    need(graph, "graph");
    need(out, "out");
    const auto& g = graph->value;
    if (!g.radius()) cwopt::fail(cwopt::ErrorCode::MissingCoordinates, "graph has no coordinates; supply probabilities");
    const auto probs = cwopt::assign_probabilities(g, c1, *g.radius());
    *out = new cwopt_model{cwopt::build_correlations(g, probs, c2, c1)};
  });
}

cwopt_status cwopt_model_create(const double* probs, size_t n_edges, const size_t* cov_e, const size_t* cov_f,
                                const double* cov_r, size_t n_cov, cwopt_model** out) {
  return guarded([&] {
    need(out, "out");
    if (n_edges > 0) need(probs, "probs");
    if (n_cov > 0) {
      need(cov_e, "cov_e");
      need(cov_f, "cov_f");
      need(cov_r, "cov_r");
    }
    std::vector<cwopt::CovarianceEntry> cross;
    for (size_t k = 0; k < n_cov; ++k) cross.push_back({cov_e[k], cov_f[k], cov_r[k]});
    *out = new cwopt_model{cwopt::LinkStatModel(std::vector<double>(probs, probs + n_edges), cross)};
  });
}

cwopt_status cwopt_model_deterministic(const cwopt_graph* graph, cwopt_model** out) {
  return guarded([&] {
    need(graph, "graph");
    need(out, "out");
    *out = new cwopt_model{cwopt::LinkStatModel::deterministic(graph->value.num_edges())};
  });
}

void cwopt_model_free(cwopt_model* model) { delete model; }
size_t cwopt_model_num_edges(const cwopt_model* model) { return model ? model->value.num_edges() : 0; }

cwopt_status cwopt_model_probability(const cwopt_model* model, size_t e, double* p) {
  return guarded([&] {
    need(model, "model");
    need(p, "p");
    cwopt::require(e < model->value.num_edges(), "edge index out of range");
    *p = model->value.prob(e);
  });
}

cwopt_status cwopt_model_covariance(const cwopt_model* model, size_t e, size_t f, double* value) {
  return guarded([&] {
    need(model, "model");
    need(value, "value");
    cwopt::require(e < model->value.num_edges() && f < model->value.num_edges(), "edge index out of range");
    *value = model->value.cross_cov()(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(f));
  });
}

cwopt_status cwopt_model_validate(const cwopt_model* model, size_t probe_samples, uint64_t seed, cwopt_validity* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto r = cwopt::validate_model(model->value, probe_samples, seed);
    out->psd = r.psd ? 1 : 0;
    out->min_eigenvalue = r.min_eigenvalue;
    out->cauchy_schwarz_violations = r.cauchy_schwarz_violations;
    out->clamp_probed = r.clamp_fraction ? 1 : 0;
    out->clamp_fraction = r.clamp_fraction.value_or(0.0);
  });
}

cwopt_status cwopt_network_save(const cwopt_graph* graph, const cwopt_model* model, const char* graph_path,
                                const char* corr_path) {
  return guarded([&] {
    need(graph, "graph");
    need(model, "model");
    need(graph_path, "graph_path");
    need(corr_path, "corr_path");
    cwopt::io::save_network(graph_path, corr_path, graph->value, model->value);
  });
}

cwopt_status cwopt_network_load(const char* graph_path, const char* corr_path, cwopt_graph** graph,
                                cwopt_model** model) {
  return guarded([&] {
    need(graph_path, "graph_path");
    need(graph, "graph");
    need(model, "model");
    auto files = cwopt::io::load_network(graph_path, corr_path ? corr_path : "");
    auto g = std::make_unique<cwopt_graph>(cwopt_graph{std::move(files.graph)});
    auto m = std::make_unique<cwopt_model>(cwopt_model{std::move(files.model)});
    *graph = g.release();
    *model = m.release();
  });
}

// ---- weights ----------------------------------------------------------------

cwopt_status cwopt_weights_create(const double* values, size_t n_edges, cwopt_weights** out) {
  return guarded([&] {
    need(out, "out");
    if (n_edges > 0) need(values, "values");
    *out = new cwopt_weights{cwopt::WeightVector(std::span<const double>(values, n_edges))};
  });
}

cwopt_status cwopt_weights_metropolis(const cwopt_graph* graph, cwopt_weights** out) {
  return guarded([&] {
    need(graph, "graph");
    need(out, "out");
    *out = new cwopt_weights{cwopt::metropolis_weights(graph->value)};
  });
}

cwopt_status cwopt_weights_sgbw(const cwopt_graph* graph, int max_iters, cwopt_weights** out) {
  return guarded([&] {
    need(graph, "graph");
    need(out, "out");
    cwopt::SubgradientSchedule schedule;
    if (max_iters > 0) schedule.max_iters = max_iters;
    *out = new cwopt_weights{cwopt::sgbw_weights(graph->value, schedule)};
  });
}

cwopt_status cwopt_weights_feasible_start(const cwopt_graph* graph, const cwopt_model* model, cwopt_weights** out) {
  return guarded([&] {
    need(graph, "graph");
    need(model, "model");
    need(out, "out");
    *out = new cwopt_weights{cwopt::feasible_start(graph->value, model->value)};
  });
}

void cwopt_weights_free(cwopt_weights* weights) { delete weights; }
size_t cwopt_weights_size(const cwopt_weights* weights) { return weights ? weights->value.size() : 0; }

size_t cwopt_weights_get(const cwopt_weights* weights, double* out, size_t capacity) {
  if (!weights || !out) return 0;
  const size_t n = std::min(capacity, weights->value.size());
  for (size_t e = 0; e < n; ++e) out[e] = weights->value[e];
  return n;
}

cwopt_status cwopt_weights_save(const cwopt_weights* weights, const char* path) {
  return guarded([&] {
    need(weights, "weights");
    need(path, "path");
    cwopt::io::save_weights(path, weights->value);
  });
}

cwopt_status cwopt_weights_load(const char* path, cwopt_weights** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new cwopt_weights{cwopt::io::load_weights(path)};
  });
}

// ---- moments / spectrum -----------------------------------------------------

cwopt_status cwopt_moment_matrix(const cwopt_weights* weights, const cwopt_model* model, const cwopt_graph* graph,
                                 double* out) {
  return guarded([&] {
    need(weights, "weights");
    need(model, "model");
    need(graph, "graph");
    need(out, "out");
    const auto m = cwopt::error_moment_matrix(weights->value, model->value, graph->value).m;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  });
}

cwopt_status cwopt_phi_n(const cwopt_weights* weights, const cwopt_model* model, const cwopt_graph* graph, int n,
                         double* out) {
  return guarded([&] {
    need(weights, "weights");
    need(model, "model");
    need(graph, "graph");
    need(out, "out");
    *out = cwopt::phi_n(weights->value, model->value, graph->value, n);
  });
}

cwopt_status cwopt_psi_n(const cwopt_weights* weights, const cwopt_graph* graph, int n, double* out) {
  return guarded([&] {
    need(weights, "weights");
    need(graph, "graph");
    need(out, "out");
    *out = cwopt::psi_n(weights->value, graph->value, n);
  });
}

cwopt_status cwopt_subgrad_phi_n(const cwopt_weights* weights, const cwopt_model* model, const cwopt_graph* graph,
                                 int n, double* out) {
  return guarded([&] {
    need(weights, "weights");
    need(model, "model");
    need(graph, "graph");
    need(out, "out");
    const auto g = cwopt::subgrad_phi_n(weights->value, model->value, graph->value, n);
    for (Eigen::Index e = 0; e < g.size(); ++e) out[e] = g(e);
  });
}

cwopt_status cwopt_moment_spectrum(const cwopt_weights* weights, const cwopt_model* model, const cwopt_graph* graph,
                                   double* out) {
  return guarded([&] {
    need(weights, "weights");
    need(model, "model");
    need(graph, "graph");
    need(out, "out");
    const auto dec = cwopt::sym_eig(cwopt::error_moment_matrix(weights->value, model->value, graph->value).m);
    for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) out[i] = dec.eigenvalues(i);
  });
}

cwopt_status cwopt_rates_compute(const cwopt_weights* weights, const cwopt_graph* graph, const cwopt_model* model,
                                 cwopt_rates* out) {
  return guarded([&] {
    need(weights, "weights");
    need(model, "model");
    need(graph, "graph");
    need(out, "out");
    const auto r = cwopt::rates(weights->value, graph->value, model->value);
    *out = {r.r_as, r.r_step, r.phi1, r.ms_bound, r.feasible ? 1 : 0};
  });
}

// ---- optimizer --------------------------------------------------------------

void cwopt_schedule_default(cwopt_schedule* out) {
  if (!out) return;
  const cwopt::SubgradientSchedule d;
  out->step_rule = CWOPT_STEP_INV_SQRT;
  out->a = d.a;
  out->scaling = CWOPT_SCALE_EVERY;
  out->max_iters = d.max_iters;
  out->feasibility_margin = d.feasibility_margin;
  out->target_gap = -1.0;
  out->gap_window = d.gap_window;
}

cwopt_status cwopt_optimize(cwopt_objective objective, int n, const cwopt_graph* graph, const cwopt_model* model,
                            const cwopt_weights* init, const cwopt_schedule* schedule, cwopt_result** out) {
  return guarded([&] {
    need(graph, "graph");
    need(init, "init");
    need(out, "out");
    *out = nullptr;
    const cwopt::Objective obj{objective == CWOPT_OBJECTIVE_PSI ? cwopt::ObjectiveKind::Psi : cwopt::ObjectiveKind::Phi,
                               n};
    if (obj.kind == cwopt::ObjectiveKind::Phi) need(model, "model");
    const auto sched = to_schedule(schedule);
    const cwopt::LinkStatModel fallback = cwopt::LinkStatModel::deterministic(graph->value.num_edges());
    const auto& m = model ? model->value : fallback;
    try {
      *out = new cwopt_result{cwopt::optimize(obj, graph->value, m, init->value, sched)};
    } catch (const cwopt::InfeasibleError& e) {
      auto partial = std::make_unique<cwopt_result>();
      partial->value.trace = e.trace();
      partial->value.iterations_used = static_cast<int>(e.trace().size());
      partial->value.best_value = std::numeric_limits<double>::infinity();
      partial->feasible = false;
      *out = partial.release();
      throw;
    }
  });
}

void cwopt_result_free(cwopt_result* result) { delete result; }
double cwopt_result_best_value(const cwopt_result* result) { return result ? result->value.best_value : 0.0; }
int cwopt_result_iterations(const cwopt_result* result) { return result ? result->value.iterations_used : 0; }

cwopt_weights* cwopt_result_best_weights(const cwopt_result* result) {
  if (!result || !result->feasible) return nullptr;
  return new cwopt_weights{result->value.best_weights};
}

cwopt_status cwopt_result_save_trace(const cwopt_result* result, const char* path) {
  return guarded([&] {
    need(result, "result");
    need(path, "path");
    std::ostringstream out;
    cwopt::io::write_trace(out, result->value.trace);
    cwopt::io::write_text(path, out.str());
  });
}

// ---- simulation -------------------------------------------------------------

cwopt_status cwopt_sampler_create(const cwopt_model* model, cwopt_sampler** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = new cwopt_sampler{cwopt::build_sampler(model->value)};
  });
}

void cwopt_sampler_free(cwopt_sampler* sampler) { delete sampler; }

cwopt_status cwopt_sampler_draw(const cwopt_sampler* sampler, uint64_t seed, uint64_t index, unsigned char* active) {
  return guarded([&] {
    need(sampler, "sampler");
    need(active, "active");
    auto rng = cwopt::derive_stream(seed, cwopt::Stream::Topology, index);
    std::vector<char> flags;
    cwopt::sample_topology(sampler->value, rng, flags);
    for (size_t e = 0; e < flags.size(); ++e) active[e] = static_cast<unsigned char>(flags[e]);
  });
}

cwopt_status cwopt_simulate(const cwopt_weights* weights, const cwopt_sampler* sampler, const cwopt_graph* graph,
                            int horizon, size_t n_trials, uint64_t seed, unsigned workers, cwopt_trajectory** out) {
  return guarded([&] {
    need(weights, "weights");
    need(sampler, "sampler");
    need(graph, "graph");
    need(out, "out");
    *out = new cwopt_trajectory{
        cwopt::monte_carlo_mse(weights->value, sampler->value, graph->value, horizon, n_trials, seed, workers)};
  });
}

void cwopt_trajectory_free(cwopt_trajectory* traj) { delete traj; }
size_t cwopt_trajectory_length(const cwopt_trajectory* traj) { return traj ? traj->value.mse.size() : 0; }

double cwopt_trajectory_mse(const cwopt_trajectory* traj, size_t k) {
  return traj && k < traj->value.mse.size() ? traj->value.mse[k] : 0.0;
}

double cwopt_trajectory_stderr(const cwopt_trajectory* traj, size_t k) {
  return traj && k < traj->value.stderr_.size() ? traj->value.stderr_[k] : 0.0;
}

double cwopt_trajectory_clamp_fraction(const cwopt_trajectory* traj) {
  return traj ? traj->value.clamps.fraction() : 0.0;
}

cwopt_status cwopt_trajectory_save(const cwopt_trajectory* traj, const char* path) {
  return guarded([&] {
    need(traj, "trajectory");
    need(path, "path");
    std::ostringstream out;
    cwopt::io::write_trajectory(out, traj->value);
    cwopt::io::write_text(path, out.str());
  });
}

cwopt_status cwopt_trajectory_load(const char* path, cwopt_trajectory** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    std::istringstream in(cwopt::io::read_text(path));
    *out = new cwopt_trajectory{cwopt::io::read_trajectory(in)};
  });
}

// ---- experiments ------------------------------------------------------------

cwopt_status cwopt_config_load(const char* path, cwopt_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new cwopt_config{cwopt::load_config(path)};
  });
}

cwopt_status cwopt_config_parse(const char* json_text, cwopt_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      cwopt::fail(cwopt::ErrorCode::Parse, e.what());
    }
    *out = new cwopt_config{cwopt::config_from_json(j)};
  });
}

void cwopt_config_free(cwopt_config* config) { delete config; }

int cwopt_config_is_static(const cwopt_config* config) { return config && config->value.static_network ? 1 : 0; }

uint64_t cwopt_config_seed(const cwopt_config* config) { return config ? config->value.seed : 0; }
size_t cwopt_config_trials(const cwopt_config* config) { return config ? config->value.n_trials : 0; }
int cwopt_config_horizon(const cwopt_config* config) { return config ? config->value.horizon : 0; }
unsigned cwopt_config_workers(const cwopt_config* config) { return config ? config->value.workers : 0; }

void cwopt_config_set_seed(cwopt_config* config, uint64_t seed) {
  if (config) config->value.seed = seed;
}

cwopt_status cwopt_config_set_trials(cwopt_config* config, size_t trials) {
  return guarded([&] {
    need(config, "config");
    cwopt::require(trials >= 1, "trials must be at least 1");
    config->value.n_trials = trials;
  });
}

cwopt_status cwopt_config_set_horizon(cwopt_config* config, int horizon) {
  return guarded([&] {
    need(config, "config");
    cwopt::require(horizon >= 1, "horizon must be at least 1");
    config->value.horizon = horizon;
  });
}

cwopt_status cwopt_config_set_output_dir(cwopt_config* config, const char* dir) {
  return guarded([&] {
    need(config, "config");
    need(dir, "dir");
    config->value.output_dir = dir;
  });
}

cwopt_status cwopt_config_set_scheme(cwopt_config* config, const char* scheme) {
  return guarded([&] {
    need(config, "config");
    need(scheme, "scheme");
    config->value.schemes = {cwopt::parse_scheme(scheme)};
  });
}

const char* cwopt_config_to_json(const cwopt_config* config) {
  returned_text = config ? cwopt::to_json(config->value).dump(2) : std::string();
  return returned_text.c_str();
}

cwopt_status cwopt_config_build_network(const cwopt_config* config, cwopt_graph** graph, cwopt_model** model) {
  return guarded([&] {
    need(config, "config");
    need(graph, "graph");
    need(model, "model");
    auto net = cwopt::build_network(config->value);
    auto g = std::make_unique<cwopt_graph>(cwopt_graph{std::move(net.graph)});
    auto m = std::make_unique<cwopt_model>(cwopt_model{std::move(net.model)});
    *graph = g.release();
    *model = m.release();
  });
}

cwopt_status cwopt_config_scheme_weights(const cwopt_config* config, const cwopt_graph* graph,
                                         const cwopt_model* model, const char* scheme, cwopt_weights** weights,
                                         cwopt_result** result) {
  return guarded([&] {
    need(config, "config");
    need(graph, "graph");
    need(model, "model");
    need(scheme, "scheme");
    need(weights, "weights");
    if (result) *result = nullptr;
    const auto spec = cwopt::parse_scheme(scheme);
    const auto& g = graph->value;
    const auto& cfg = config->value;
    const cwopt::LinkStatModel effective =
        cfg.static_network ? cwopt::LinkStatModel::deterministic(g.num_edges()) : model->value;
    switch (spec.kind) {
      case cwopt::SchemeKind::Metropolis:
        *weights = new cwopt_weights{cwopt::metropolis_weights(g)};
        return;
      case cwopt::SchemeKind::Sgbw:
        *weights = new cwopt_weights{cwopt::sgbw_weights(g, cfg.schedule)};
        return;
      case cwopt::SchemeKind::Phi:
      case cwopt::SchemeKind::Psi: {
        const cwopt::Objective obj{
            spec.kind == cwopt::SchemeKind::Psi ? cwopt::ObjectiveKind::Psi : cwopt::ObjectiveKind::Phi, spec.n};
        const cwopt::LinkStatModel opt_model =
            obj.kind == cwopt::ObjectiveKind::Psi ? cwopt::LinkStatModel::deterministic(g.num_edges()) : effective;
        const auto init = cwopt::feasible_start(g, opt_model, cfg.schedule.feasibility_margin);
        auto res = cwopt::optimize(obj, g, opt_model, init, cfg.schedule);
        *weights = new cwopt_weights{res.best_weights};
        if (result) *result = new cwopt_result{std::move(res)};
        return;
      }
    }
  });
}

cwopt_status cwopt_run_experiment(const cwopt_config* config, const char** report_text) {
  return guarded([&] {
    need(config, "config");
    const auto report = cwopt::run_experiment(config->value);
    returned_text = report.report_text;
    if (report_text) *report_text = returned_text.c_str();
  });
}

cwopt_status cwopt_compare(const char* const* names, const cwopt_trajectory* const* trajectories, size_t count,
                           const double* thresholds, size_t n_thresholds, const char* summary_path,
                           const char* crossings_path, const char** summary_text) {
  return guarded([&] {
    cwopt::require(count >= 1, "at least one trajectory required");
    need(names, "names");
    need(trajectories, "trajectories");
    std::vector<double> thr{1e-2, 1e-3};
    if (n_thresholds > 0) {
      need(thresholds, "thresholds");
      thr.assign(thresholds, thresholds + n_thresholds);
    }
    std::vector<std::pair<std::string, cwopt::ErrorTrajectory>> named;
    for (size_t k = 0; k < count; ++k) {
      need(names[k], "trajectory name");
      need(trajectories[k], "trajectory");
      named.emplace_back(names[k], trajectories[k]->value);
    }
    const auto table = cwopt::compare_report(named, thr);
    const auto summary = cwopt::summary_csv(table);
    const auto crossings = cwopt::crossings_csv(table);
    if (summary_path) cwopt::io::write_text(summary_path, summary);
    if (crossings_path) cwopt::io::write_text(crossings_path, crossings);
    returned_text = summary + "\n" + crossings;
    if (summary_text) *summary_text = returned_text.c_str();
  });
}

}  // extern "C"

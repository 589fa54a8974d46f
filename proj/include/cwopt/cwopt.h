/* C interface to the consensus weight design library.
 *
 * Every object is an opaque handle created by a *_create / *_load / *_generate
 * call and released with the matching *_free. Functions return a cwopt_status;
 * on failure cwopt_last_error() describes the problem (thread-local, valid until
 * the next call on the same thread). Edge and node indices are 0-based here;
 * the file formats use 1-based indices. */
#ifndef CWOPT_H
#define CWOPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(CWOPT_BUILDING_LIBRARY)
#define CWOPT_API __attribute__((visibility("default")))
#else
#define CWOPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cwopt_status {
  CWOPT_OK = 0,
  CWOPT_ERR_INVALID_ARGUMENT = 1,
  CWOPT_ERR_DISCONNECTED = 2,
  CWOPT_ERR_MISSING_COORDINATES = 3,
  CWOPT_ERR_NOT_PSD = 4,
  CWOPT_ERR_NOT_SYMMETRIC = 5,
  CWOPT_ERR_INFEASIBLE = 6,
  CWOPT_ERR_IO = 7,
  CWOPT_ERR_PARSE = 8,
  CWOPT_ERR_INTERNAL = 99
} cwopt_status;

typedef struct cwopt_graph cwopt_graph;
typedef struct cwopt_model cwopt_model;
typedef struct cwopt_weights cwopt_weights;
typedef struct cwopt_sampler cwopt_sampler;
typedef struct cwopt_trajectory cwopt_trajectory;
typedef struct cwopt_result cwopt_result;
typedef struct cwopt_config cwopt_config;

CWOPT_API const char* cwopt_last_error(void);
CWOPT_API const char* cwopt_status_name(cwopt_status status);

/* ---- supergraph ---------------------------------------------------------- */

/* Nodes uniform on the unit square, edge iff distance < radius. */
CWOPT_API cwopt_status cwopt_graph_generate_geometric(int n_nodes, double radius, uint64_t seed, cwopt_graph** out,
                                                      int* connected);
/* Geometric graph with exactly target_edges edges, resampled until connected. */
CWOPT_API cwopt_status cwopt_graph_generate_with_edges(int n_nodes, size_t target_edges, uint64_t seed,
                                                       int max_attempts, cwopt_graph** out);
/* Geometric graph on caller coordinates (xy holds 2*n_nodes values). */
CWOPT_API cwopt_status cwopt_graph_from_points(const double* xy, int n_nodes, double radius, cwopt_graph** out,
                                               int* connected);
/* Graph from an explicit edge list (pairs of 0-based endpoints). */
CWOPT_API cwopt_status cwopt_graph_from_edges(int n_nodes, const int* endpoints, size_t n_edges, cwopt_graph** out);
CWOPT_API void cwopt_graph_free(cwopt_graph* graph);
CWOPT_API int cwopt_graph_num_nodes(const cwopt_graph* graph);
CWOPT_API size_t cwopt_graph_num_edges(const cwopt_graph* graph);
CWOPT_API cwopt_status cwopt_graph_edge(const cwopt_graph* graph, size_t e, int* i, int* j);
CWOPT_API int cwopt_graph_is_connected(const cwopt_graph* graph);
/* Generation radius; fails for graphs without coordinates. */
CWOPT_API cwopt_status cwopt_graph_radius(const cwopt_graph* graph, double* radius);

/* ---- link statistics model ----------------------------------------------- */

/* P_e = 1 - c1 (d_e/r)^2, R = c2 Pmin (1 - Pmax) on edge pairs sharing a node. */
CWOPT_API cwopt_status cwopt_model_geometric(const cwopt_graph* graph, double c1, double c2, cwopt_model** out);
/* Explicit probabilities plus off-diagonal covariance triples (e, f, R). */
CWOPT_API cwopt_status cwopt_model_create(const double* probs, size_t n_edges, const size_t* cov_e,
                                          const size_t* cov_f, const double* cov_r, size_t n_cov, cwopt_model** out);
CWOPT_API cwopt_status cwopt_model_deterministic(const cwopt_graph* graph, cwopt_model** out);
CWOPT_API void cwopt_model_free(cwopt_model* model);
CWOPT_API size_t cwopt_model_num_edges(const cwopt_model* model);
CWOPT_API cwopt_status cwopt_model_probability(const cwopt_model* model, size_t e, double* p);
CWOPT_API cwopt_status cwopt_model_covariance(const cwopt_model* model, size_t e, size_t f, double* value);

typedef struct cwopt_validity {
  int psd;
  double min_eigenvalue;
  size_t cauchy_schwarz_violations;
  int clamp_probed;
  double clamp_fraction;
} cwopt_validity;

CWOPT_API cwopt_status cwopt_model_validate(const cwopt_model* model, size_t probe_samples, uint64_t seed,
                                            cwopt_validity* out);

/* Graph file "N M" + "i j P" lines; correlation file "e f R" lines. */
CWOPT_API cwopt_status cwopt_network_save(const cwopt_graph* graph, const cwopt_model* model, const char* graph_path,
                                          const char* corr_path);
/* corr_path may be NULL (independent links). */
CWOPT_API cwopt_status cwopt_network_load(const char* graph_path, const char* corr_path, cwopt_graph** graph,
                                          cwopt_model** model);

/* ---- weights ------------------------------------------------------------- */

CWOPT_API cwopt_status cwopt_weights_create(const double* values, size_t n_edges, cwopt_weights** out);
CWOPT_API cwopt_status cwopt_weights_metropolis(const cwopt_graph* graph, cwopt_weights** out);
CWOPT_API cwopt_status cwopt_weights_sgbw(const cwopt_graph* graph, int max_iters, cwopt_weights** out);
CWOPT_API cwopt_status cwopt_weights_feasible_start(const cwopt_graph* graph, const cwopt_model* model,
                                                    cwopt_weights** out);
CWOPT_API void cwopt_weights_free(cwopt_weights* weights);
CWOPT_API size_t cwopt_weights_size(const cwopt_weights* weights);
/* Copies min(capacity, size) values. */
CWOPT_API size_t cwopt_weights_get(const cwopt_weights* weights, double* out, size_t capacity);
CWOPT_API cwopt_status cwopt_weights_save(const cwopt_weights* weights, const char* path);
CWOPT_API cwopt_status cwopt_weights_load(const char* path, cwopt_weights** out);

/* ---- moments and spectrum ------------------------------------------------ */

/* Row-major N x N matrix E[W^2] - J into out (N*N doubles). */
CWOPT_API cwopt_status cwopt_moment_matrix(const cwopt_weights* weights, const cwopt_model* model,
                                           const cwopt_graph* graph, double* out);
CWOPT_API cwopt_status cwopt_phi_n(const cwopt_weights* weights, const cwopt_model* model, const cwopt_graph* graph,
                                   int n, double* out);
CWOPT_API cwopt_status cwopt_psi_n(const cwopt_weights* weights, const cwopt_graph* graph, int n, double* out);
/* One subgradient entry per edge into out (n_edges doubles). */
CWOPT_API cwopt_status cwopt_subgrad_phi_n(const cwopt_weights* weights, const cwopt_model* model,
                                           const cwopt_graph* graph, int n, double* out);
/* Descending eigenvalues of E[W^2] - J into out (N doubles). */
CWOPT_API cwopt_status cwopt_moment_spectrum(const cwopt_weights* weights, const cwopt_model* model,
                                             const cwopt_graph* graph, double* out);

typedef struct cwopt_rates {
  double r_as;
  double r_step;
  double phi1;
  double ms_bound;
  int feasible;
} cwopt_rates;

CWOPT_API cwopt_status cwopt_rates_compute(const cwopt_weights* weights, const cwopt_graph* graph,
                                           const cwopt_model* model, cwopt_rates* out);

/* ---- optimizer ----------------------------------------------------------- */

typedef enum cwopt_objective { CWOPT_OBJECTIVE_PHI = 0, CWOPT_OBJECTIVE_PSI = 1 } cwopt_objective;
typedef enum cwopt_step_rule { CWOPT_STEP_CONSTANT = 0, CWOPT_STEP_INV_SQRT = 1, CWOPT_STEP_INV = 2 } cwopt_step_rule;
/* Step coefficient divided by nothing, by ||g_0||, or by ||g_t|| each iteration. */
typedef enum cwopt_step_scaling { CWOPT_SCALE_RAW = 0, CWOPT_SCALE_INITIAL = 1, CWOPT_SCALE_EVERY = 2 } cwopt_step_scaling;

typedef struct cwopt_schedule {
  cwopt_step_rule step_rule;
  double a;
  cwopt_step_scaling scaling;
  int max_iters;
  double feasibility_margin;
  double target_gap; /* negative disables */
  int gap_window;
} cwopt_schedule;

CWOPT_API void cwopt_schedule_default(cwopt_schedule* out);

/* On CWOPT_ERR_INFEASIBLE *out still receives a result handle carrying the trace. */
CWOPT_API cwopt_status cwopt_optimize(cwopt_objective objective, int n, const cwopt_graph* graph,
                                      const cwopt_model* model, const cwopt_weights* init,
                                      const cwopt_schedule* schedule, cwopt_result** out);
CWOPT_API void cwopt_result_free(cwopt_result* result);
CWOPT_API double cwopt_result_best_value(const cwopt_result* result);
CWOPT_API int cwopt_result_iterations(const cwopt_result* result);
/* New weight handle owned by the caller; NULL if no feasible iterate. */
CWOPT_API cwopt_weights* cwopt_result_best_weights(const cwopt_result* result);
/* "iter,value,feasible,step" */
CWOPT_API cwopt_status cwopt_result_save_trace(const cwopt_result* result, const char* path);

/* ---- simulation ---------------------------------------------------------- */

CWOPT_API cwopt_status cwopt_sampler_create(const cwopt_model* model, cwopt_sampler** out);
CWOPT_API void cwopt_sampler_free(cwopt_sampler* sampler);
/* One 0/1 flag per edge into active. */
CWOPT_API cwopt_status cwopt_sampler_draw(const cwopt_sampler* sampler, uint64_t seed, uint64_t index,
                                          unsigned char* active);

CWOPT_API cwopt_status cwopt_simulate(const cwopt_weights* weights, const cwopt_sampler* sampler,
                                      const cwopt_graph* graph, int horizon, size_t n_trials, uint64_t seed,
                                      unsigned workers, cwopt_trajectory** out);
CWOPT_API void cwopt_trajectory_free(cwopt_trajectory* traj);
CWOPT_API size_t cwopt_trajectory_length(const cwopt_trajectory* traj);
CWOPT_API double cwopt_trajectory_mse(const cwopt_trajectory* traj, size_t k);
CWOPT_API double cwopt_trajectory_stderr(const cwopt_trajectory* traj, size_t k);
CWOPT_API double cwopt_trajectory_clamp_fraction(const cwopt_trajectory* traj);
/* "k,mse,stderr" */
CWOPT_API cwopt_status cwopt_trajectory_save(const cwopt_trajectory* traj, const char* path);
CWOPT_API cwopt_status cwopt_trajectory_load(const char* path, cwopt_trajectory** out);

/* ---- experiments --------------------------------------------------------- */

CWOPT_API cwopt_status cwopt_config_load(const char* path, cwopt_config** out);
CWOPT_API cwopt_status cwopt_config_parse(const char* json_text, cwopt_config** out);
CWOPT_API void cwopt_config_free(cwopt_config* config);
/* 1 when the config simulates the supergraph as a static network. */
CWOPT_API int cwopt_config_is_static(const cwopt_config* config);
CWOPT_API uint64_t cwopt_config_seed(const cwopt_config* config);
CWOPT_API size_t cwopt_config_trials(const cwopt_config* config);
CWOPT_API int cwopt_config_horizon(const cwopt_config* config);
CWOPT_API unsigned cwopt_config_workers(const cwopt_config* config);
CWOPT_API void cwopt_config_set_seed(cwopt_config* config, uint64_t seed);
CWOPT_API cwopt_status cwopt_config_set_trials(cwopt_config* config, size_t trials);
CWOPT_API cwopt_status cwopt_config_set_horizon(cwopt_config* config, int horizon);
CWOPT_API cwopt_status cwopt_config_set_output_dir(cwopt_config* config, const char* dir);
/* Replaces the scheme list with a single scheme ("metropolis", "sgbw", "phi:n", "psi:n"). */
CWOPT_API cwopt_status cwopt_config_set_scheme(cwopt_config* config, const char* scheme);
/* Resolved config as JSON; the string lives until the next call on this thread. */
CWOPT_API const char* cwopt_config_to_json(const cwopt_config* config);

/* Network for the config's graph source (generated from its seed, or loaded). */
CWOPT_API cwopt_status cwopt_config_build_network(const cwopt_config* config, cwopt_graph** graph,
                                                  cwopt_model** model);
/* Weights for one scheme name against the config's network and schedule. */
CWOPT_API cwopt_status cwopt_config_scheme_weights(const cwopt_config* config, const cwopt_graph* graph,
                                                   const cwopt_model* model, const char* scheme,
                                                   cwopt_weights** weights, cwopt_result** result);

/* Full pipeline; writes outputs under the config's output directory. The
 * report text lives until the next call on this thread. */
CWOPT_API cwopt_status cwopt_run_experiment(const cwopt_config* config, const char** report_text);

/* Iterations-to-threshold and crossing tables for named trajectories; writes
 * summary CSV to summary_path and crossings CSV to crossings_path (either may
 * be NULL). The summary text lives until the next call on this thread. */
CWOPT_API cwopt_status cwopt_compare(const char* const* names, const cwopt_trajectory* const* trajectories,
                                     size_t count, const double* thresholds, size_t n_thresholds,
                                     const char* summary_path, const char* crossings_path,
                                     const char** summary_text);

#ifdef __cplusplus
}
#endif

#endif /* CWOPT_H */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cwopt/moments.hpp"
#include "cwopt/rng.hpp"
#include "cwopt/supergraph.hpp"

namespace cwopt {

/// Sequential conditional-linear sampler for correlated binary links.
///
/// Edges are drawn in canonical order. Edge e is Bernoulli with conditional
/// mean P_e + b_e^T (x_S - P_S), where S ranges over earlier edges kept in the
/// conditioning set and b_e regresses e's covariance column on that block.
/// Edges whose residual variance vanishes (deterministic links, or linear
/// combinations of earlier links) are left out of S.
class TopologySampler {
public:
  static constexpr double kClampEps = 1e-9;

  std::size_t num_edges() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  bool is_deterministic() const noexcept { return deterministic_; }

  /// Raw (unclamped) conditional mean of edge e given earlier outcomes.
  double conditional_mean(std::size_t e, std::span<const char> outcomes) const;

  /// Regression coefficients of edge e on earlier edges, dense over 0..e-1.
  std::vector<double> coefficients(std::size_t e) const;

private:
  friend TopologySampler build_sampler(const LinkStatModel& model);

  std::vector<double> probs_;
  // Regression of edge e on the conditioning members that precede it:
  // coeffs_[e][k] pairs with members_[k].
  std::vector<std::vector<double>> coeffs_;
  std::vector<std::size_t> members_;
  bool deterministic_ = false;
};

struct ClampStats {
  std::size_t draws = 0;
  std::size_t clamps = 0;

  double fraction() const noexcept { return draws == 0 ? 0.0 : static_cast<double>(clamps) / static_cast<double>(draws); }
  ClampStats& operator+=(const ClampStats& o) {
    draws += o.draws;
    clamps += o.clamps;
    return *this;
  }
};

/// Builds the regression vectors. Throws NotPositiveSemidefinite when the
/// covariance matrix has a negative residual variance (shrink c2).
TopologySampler build_sampler(const LinkStatModel& model);

/// Fills `active` with one 0/1 flag per edge.
void sample_topology(const TopologySampler& sampler, Rng& rng, std::vector<char>& active,
                     ClampStats* stats = nullptr);

/// ||e(k)||^2 for k = 0..horizon with e(k+1) = (W(k) - J) e(k), fresh topology each step.
std::vector<double> run_consensus(const WeightVector& weights, const TopologySampler& sampler,
                                  const Supergraph& graph, std::span<const double> x0, int horizon, Rng& rng,
                                  ClampStats* stats = nullptr);

/// Applies the realized state matrix: out = W(active) x.
void apply_state_matrix(const WeightVector& weights, std::span<const char> active, const Supergraph& graph,
                        std::span<const double> x, std::span<double> out);

struct ErrorTrajectory {
  std::vector<double> mse;
  std::vector<double> stderr_;
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;
  ClampStats clamps;
};

/// Unit-norm consensus error from i.i.d. standard normal node values.
std::vector<double> random_initial_error(int n_nodes, Rng& rng);

/// Monte Carlo mean of ||e(k)||^2 over independent trials. Trial t uses
/// substreams derived from (seed, t) for its initial condition and its
/// topology sequence, so results do not depend on `workers`.
ErrorTrajectory monte_carlo_mse(const WeightVector& weights, const TopologySampler& sampler,
                                const Supergraph& graph, int horizon, std::size_t n_trials, std::uint64_t seed,
                                unsigned workers = 1);

}  // namespace cwopt

#include "cwopt/optimizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cwopt/spectrum.hpp"

namespace cwopt {

void SubgradientSchedule::validate() const {
  require(a > 0.0 && std::isfinite(a), "step scale a must be positive");
  require(max_iters >= 1, "max_iters must be at least 1");
  require(feasibility_margin > 0.0 && feasibility_margin < 1.0, "feasibility margin must lie in (0,1)");
  require(!target_gap || *target_gap >= 0.0, "target gap must be nonnegative");
  require(gap_window >= 1, "gap window must be at least 1");
}

WeightVector metropolis_weights(const Supergraph& graph) {
  const auto deg = graph.degrees();
  Eigen::VectorXd w(static_cast<Eigen::Index>(graph.num_edges()));
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    const int dmax = std::max(deg[static_cast<std::size_t>(edge.i)], deg[static_cast<std::size_t>(edge.j)]);
    w(static_cast<Eigen::Index>(e)) = 1.0 / (1.0 + dmax);
  }
  return WeightVector(std::move(w));
}

WeightVector sgbw_weights(const Supergraph& graph, const SubgradientSchedule& schedule) {
  if (!graph.is_connected()) fail(ErrorCode::Disconnected, "supergraph-based weights need a connected graph");
  const auto model = LinkStatModel::deterministic(graph.num_edges());
  return optimize({ObjectiveKind::Psi, 1}, graph, model, metropolis_weights(graph), schedule).best_weights;
}

WeightVector feasible_start(const Supergraph& graph, const LinkStatModel& model, double margin, int max_halvings) {
  Eigen::VectorXd w = metropolis_weights(graph).values();
  for (int h = 0; h <= max_halvings; ++h) {
    WeightVector candidate(w);
    if (phi_n(candidate, model, graph, 1) < 1.0 - margin) return candidate;
    w *= 0.5;
  }
  std::ostringstream msg;
  msg << "Metropolis weights stay infeasible after " << max_halvings << " halvings";
  throw InfeasibleError(msg.str(), {});
}

constexpr double kDivergenceLimit = 1e6;

OptimizationResult optimize(const Objective& objective, const Supergraph& graph, const LinkStatModel& model,
                            const WeightVector& init, const SubgradientSchedule& schedule) {
  schedule.validate();
  require(init.size() == graph.num_edges(), "initial weights must have one entry per edge");
  require(objective.n >= 1 && objective.n <= graph.num_nodes() - 1, "objective index n must lie in 1..N-1");
  const LinkStatModel static_model =
      objective.kind == ObjectiveKind::Psi ? LinkStatModel::deterministic(graph.num_edges()) : LinkStatModel{};
  const LinkStatModel& active_model = objective.kind == ObjectiveKind::Psi ? static_model : model;
  require(active_model.num_edges() == graph.num_edges(), "link model and graph disagree on the edge count");

  const double bound = 1.0 - schedule.feasibility_margin;
  OptimizationResult result;
  result.best_value = std::numeric_limits<double>::infinity();
  result.trace.reserve(static_cast<std::size_t>(schedule.max_iters));
  std::vector<double> best_history;
  best_history.reserve(static_cast<std::size_t>(schedule.max_iters));

  Eigen::VectorXd x = init.values();
  double base = schedule.a;
  for (int t = 0; t < schedule.max_iters; ++t) {
    // Unnormalized subgradients grow with the weights, so a step scale that is
    // too large runs away instead of settling.
    if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > kDivergenceLimit) {
      std::ostringstream msg;
      msg << "subgradient iterates diverged at iteration " << t << "; reduce the step scale a";
      fail(ErrorCode::InvalidArgument, msg.str());
    }
    const WeightVector current(x);
    const auto eval = evaluate_spectrum(current, active_model, graph, objective.n);
    TraceEntry entry;
    entry.value = eval.phin;
    entry.phi1 = eval.phi1;
    entry.feasible = eval.phi1 < bound;
    if (entry.feasible && eval.phin < result.best_value) {
      result.best_value = eval.phin;
      result.best_weights = current;
    }
    best_history.push_back(result.best_value);

    const Eigen::VectorXd g =
        ky_fan_subgradient(eval, current, active_model, graph, entry.feasible ? objective.n : 1);
    const double gnorm = g.norm();
    if (t == 0 && schedule.scaling == StepScaling::Initial && gnorm > 0.0) base = schedule.a / gnorm;

    const double iter = static_cast<double>(t + 1);
    switch (schedule.step_rule) {
      case StepRule::Constant: entry.step = base; break;
      case StepRule::InvSqrt: entry.step = base / std::sqrt(iter); break;
      case StepRule::Inv: entry.step = base / iter; break;
    }
    if (schedule.scaling == StepScaling::Every && gnorm > 0.0) entry.step /= gnorm;
    result.trace.push_back(entry);
    result.iterations_used = t + 1;

    if (gnorm == 0.0) break;  // stationary point of the function being stepped
    if (schedule.target_gap && t >= schedule.gap_window && std::isfinite(result.best_value)) {
      const double earlier = best_history[static_cast<std::size_t>(t - schedule.gap_window)];
      if (std::isfinite(earlier) && earlier - result.best_value < *schedule.target_gap) break;
    }
    x -= entry.step * g;
  }

  if (!std::isfinite(result.best_value)) {
    std::ostringstream msg;
    msg << "no feasible iterate (phi_1 < " << bound << ") within " << result.iterations_used << " iterations";
    throw InfeasibleError(msg.str(), std::move(result.trace));
  }
  return result;
}

}  // namespace cwopt

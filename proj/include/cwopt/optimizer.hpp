#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cwopt/error.hpp"
#include "cwopt/moments.hpp"
#include "cwopt/supergraph.hpp"

namespace cwopt {

enum class StepRule { Constant, InvSqrt, Inv };

/// How the step rule's coefficient is scaled against the subgradient.
///   Raw:     step_t = rule(a, t)
///   Initial: step_t = rule(a, t) / ||g_0||
///   Every:   step_t = rule(a, t) / ||g_t||   (moves a distance rule(a, t))
enum class StepScaling { Raw, Initial, Every };

struct SubgradientSchedule {
  StepRule step_rule = StepRule::InvSqrt;
  double a = 0.1;
  StepScaling scaling = StepScaling::Every;
  int max_iters = 2000;
  double feasibility_margin = 1e-3;
  /// Stop once the best value improved by less than this over the last
  /// `gap_window` iterations.
  std::optional<double> target_gap;
  int gap_window = 100;

  void validate() const;
};

enum class ObjectiveKind { Phi, Psi };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::Phi;
  int n = 1;
};

struct TraceEntry {
  double value = 0.0;  // φ_n at the iterate
  double phi1 = 0.0;
  bool feasible = false;
  double step = 0.0;
};

struct OptimizationResult {
  WeightVector best_weights;
  double best_value = 0.0;
  std::vector<TraceEntry> trace;
  int iterations_used = 0;
};

class InfeasibleError : public Error {
public:
  InfeasibleError(const std::string& what, std::vector<TraceEntry> trace)
      : Error(ErrorCode::Infeasible, what), trace_(std::move(trace)) {}

  const std::vector<TraceEntry>& trace() const noexcept { return trace_; }

private:
  std::vector<TraceEntry> trace_;
};

/// W_e = 1 / (1 + max(d_i, d_j)) with supergraph degrees.
WeightVector metropolis_weights(const Supergraph& graph);

/// Static-optimal (n = 1) weights on the supergraph, started from Metropolis.
WeightVector sgbw_weights(const Supergraph& graph, const SubgradientSchedule& schedule = {});

/// Switching subgradient method: step along ∂φ_n while φ_1 < 1 - ε, along
/// ∂φ_1 otherwise. A Psi objective runs the same scheme on the static model.
OptimizationResult optimize(const Objective& objective, const Supergraph& graph, const LinkStatModel& model,
                            const WeightVector& init, const SubgradientSchedule& schedule = {});

/// Metropolis weights, halved until φ_1 < 1 - ε (at most `max_halvings` times).
WeightVector feasible_start(const Supergraph& graph, const LinkStatModel& model, double margin = 1e-3,
                            int max_halvings = 20);

}  // namespace cwopt

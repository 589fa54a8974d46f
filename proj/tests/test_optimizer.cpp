#include "doctest.h"

#include <random>

#include "cwopt/error.hpp"
#include "cwopt/optimizer.hpp"
#include "cwopt/rng.hpp"
#include "cwopt/spectrum.hpp"
#include "oracles.hpp"

using namespace cwopt;

namespace {

struct PaperNetwork {
  Supergraph graph;
  LinkStatModel model;
};

PaperNetwork small_geometric(std::uint64_t seed, int n, std::size_t m) {
  Rng rng = derive_stream(seed, Stream::Graph);
  auto gg = generate_with_edge_count(n, m, rng);
  const auto p = assign_probabilities(gg.graph, 0.6, *gg.graph.radius());
  auto model = build_correlations(gg.graph, p, 0.2, 0.6);
  return {std::move(gg.graph), std::move(model)};
}

}  // namespace

TEST_CASE("Metropolis weights") {
  CHECK(metropolis_weights(Supergraph(2, {{0, 1}}))[0] == 0.5);
  const auto star = metropolis_weights(Supergraph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}));
  for (std::size_t e = 0; e < 4; ++e) CHECK(star[e] == doctest::Approx(0.2));

  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    auto g = oracle::random_connected_graph(15, 0.2, rng);
    CHECK(psi_n(metropolis_weights(g), g, 1) < 1.0);
  }
}

TEST_CASE("SGBW weights") {
  SUBCASE("two nodes") {
    Supergraph two(2, {{0, 1}});
    const auto w = sgbw_weights(two);
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(psi_n(w, two, 1) < 1e-6);
  }
  SUBCASE("three-node path") {
    Supergraph path(3, {{0, 1}, {1, 2}});
    const auto w = sgbw_weights(path);
    CHECK(w[0] == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(w[1] == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(psi_n(w, path, 1) == doctest::Approx(0.25).epsilon(1e-3));
  }
  SUBCASE("dominates Metropolis") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 3; ++t) {
      auto g = oracle::random_connected_graph(12, 0.2, rng);
      CHECK(psi_n(sgbw_weights(g), g, 1) <= psi_n(metropolis_weights(g), g, 1));
    }
  }
  SUBCASE("disconnected graph is an error") {
    try {
      (void)sgbw_weights(Supergraph(4, {{0, 1}, {2, 3}}));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Disconnected);
    }
  }
}

TEST_CASE("two-node random network converges to w = 1/2") {
  Supergraph two(2, {{0, 1}});
  LinkStatModel model({0.8}, {});
  auto r = optimize({ObjectiveKind::Phi, 1}, two, model, WeightVector(std::vector<double>{0.1}));
  CHECK(r.best_weights[0] == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(r.best_value == doctest::Approx(0.2).epsilon(5e-3));
}

TEST_CASE("three-node path: psi_1 matches a 2-D grid search") {
  Supergraph path(3, {{0, 1}, {1, 2}});
  double grid_best = 1e300;
  // Coarse grid then a fine grid around the coarse minimizer, both at the
  // stated 1e-3 resolution near the optimum.
  double bx = 0, by = 0;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) {
      const double v = psi_n(WeightVector(std::vector<double>{i / 100.0, j / 100.0}), path, 1);
      if (v < grid_best) grid_best = v, bx = i / 100.0, by = j / 100.0;
    }
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) {
      const double x = bx + i * 1e-3, y = by + j * 1e-3;
      const double v = psi_n(WeightVector(std::vector<double>{x, y}), path, 1);
      if (v < grid_best) grid_best = v;
    }
  auto r = optimize({ObjectiveKind::Psi, 1}, path, LinkStatModel::deterministic(2), metropolis_weights(path));
  CHECK(std::abs(r.best_value - grid_best) < 1e-3);
}

TEST_CASE("best iterate is feasible and the best-value sequence never rises") {
  auto net = small_geometric(2, 30, 80);
  const auto init = feasible_start(net.graph, net.model);
  SubgradientSchedule s;
  s.max_iters = 300;
  auto r = optimize({ObjectiveKind::Phi, 5}, net.graph, net.model, init, s);
  CHECK(r.iterations_used == 300);
  CHECK(r.trace.size() == 300);
  CHECK(phi_n(r.best_weights, net.model, net.graph, 1) < 1.0 - s.feasibility_margin + 1e-12);
  double best = 1e300;
  double min_feasible = 1e300;
  for (const auto& t : r.trace) {
    if (t.feasible) min_feasible = std::min(min_feasible, t.value);
    best = std::min(best, t.feasible ? t.value : best);
  }
  CHECK(r.best_value == min_feasible);
  CHECK(phi_n(r.best_weights, net.model, net.graph, 5) == r.best_value);
}

TEST_CASE("optimizer dominates the baselines") {
  auto net = small_geometric(4, 30, 80);
  SubgradientSchedule s;
  s.max_iters = 400;
  const auto mw = metropolis_weights(net.graph);
  const auto sg = sgbw_weights(net.graph, s);
  const auto init = feasible_start(net.graph, net.model);
  for (int n : {1, 8}) {
    auto r = optimize({ObjectiveKind::Phi, n}, net.graph, net.model, init, s);
    CHECK(r.best_value <= phi_n(mw, net.model, net.graph, n));
    CHECK(r.best_value <= phi_n(sg, net.model, net.graph, n) + 1e-9);
  }
}

TEST_CASE("psi objective equals phi on the deterministic model") {
  auto net = small_geometric(6, 20, 45);
  SubgradientSchedule s;
  s.max_iters = 150;
  const auto init = metropolis_weights(net.graph);
  auto a = optimize({ObjectiveKind::Psi, 3}, net.graph, net.model, init, s);
  auto b = optimize({ObjectiveKind::Phi, 3}, net.graph, LinkStatModel::deterministic(net.graph.num_edges()), init, s);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t t = 0; t < a.trace.size(); ++t) {
    CHECK(a.trace[t].value == b.trace[t].value);
    CHECK(a.trace[t].step == b.trace[t].step);
  }
  CHECK(a.best_weights == b.best_weights);
}

TEST_CASE("optimization is deterministic") {
  auto net = small_geometric(8, 25, 60);
  SubgradientSchedule s;
  s.max_iters = 100;
  const auto init = feasible_start(net.graph, net.model);
  auto a = optimize({ObjectiveKind::Phi, 2}, net.graph, net.model, init, s);
  auto b = optimize({ObjectiveKind::Phi, 2}, net.graph, net.model, init, s);
  CHECK(a.best_weights == b.best_weights);
  for (std::size_t t = 0; t < a.trace.size(); ++t) CHECK(a.trace[t].value == b.trace[t].value);
}

TEST_CASE("step rules and scalings") {
  Supergraph two(2, {{0, 1}});
  LinkStatModel model({0.8}, {});
  const WeightVector init(std::vector<double>{0.1});
  for (auto rule : {StepRule::Constant, StepRule::InvSqrt, StepRule::Inv}) {
    SubgradientSchedule s;
    s.step_rule = rule;
    s.scaling = StepScaling::Initial;
    s.max_iters = 5;
    auto r = optimize({ObjectiveKind::Phi, 1}, two, model, init, s);
    const double base = s.a / std::abs(-4 * 0.8 + 8 * 0.8 * 0.1);
    CHECK(r.trace[0].step == doctest::Approx(base));
    const double expect3 = rule == StepRule::Constant ? base : rule == StepRule::InvSqrt ? base / std::sqrt(3.0) : base / 3;
    CHECK(r.trace[2].step == doctest::Approx(expect3));
  }
  SubgradientSchedule raw;
  raw.scaling = StepScaling::Raw;
  raw.step_rule = StepRule::Constant;
  raw.a = 0.05;
  raw.max_iters = 3;
  CHECK(optimize({ObjectiveKind::Phi, 1}, two, model, init, raw).trace[1].step == 0.05);
}

TEST_CASE("target gap stops early") {
  Supergraph two(2, {{0, 1}});
  LinkStatModel model({0.8}, {});
  SubgradientSchedule s;
  s.target_gap = 1e-9;
  s.gap_window = 20;
  auto r = optimize({ObjectiveKind::Phi, 1}, two, model, WeightVector(std::vector<double>{0.1}), s);
  CHECK(r.iterations_used < s.max_iters);
}

TEST_CASE("schedule validation") {
  SubgradientSchedule s;
  s.a = -1;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.feasibility_margin = 1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.max_iters = 0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("infeasible runs report the trace") {
  Supergraph two(2, {{0, 1}});
  LinkStatModel model({0.8}, {});
  SubgradientSchedule s;
  s.max_iters = 3;
  s.scaling = StepScaling::Raw;
  s.step_rule = StepRule::Constant;
  s.a = 1e-6;
  try {
    (void)optimize({ObjectiveKind::Phi, 1}, two, model, WeightVector(std::vector<double>{0.0}), s);
    FAIL("expected an error");
  } catch (const InfeasibleError& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
    CHECK(e.trace().size() == 3);
  }
}

TEST_CASE("runaway steps are reported") {
  auto net = small_geometric(3, 30, 80);
  SubgradientSchedule s;
  s.scaling = StepScaling::Initial;
  s.a = 10.0;
  s.max_iters = 500;
  CHECK_THROWS_AS(optimize({ObjectiveKind::Phi, 1}, net.graph, net.model, feasible_start(net.graph, net.model), s),
                  Error);
}

TEST_CASE("feasible start halves Metropolis weights when needed") {
  auto net = small_geometric(1, 30, 80);
  const auto w = feasible_start(net.graph, net.model);
  CHECK(phi_n(w, net.model, net.graph, 1) < 1.0 - 1e-3);
}

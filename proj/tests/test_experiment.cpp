#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cwopt/error.hpp"
#include "cwopt/experiment.hpp"
#include "cwopt/io.hpp"
#include "cwopt/rng.hpp"

using namespace cwopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cwopt_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.graph.n_nodes = 20;
  c.graph.target_edges = 45;
  c.schemes = {parse_scheme("metropolis"), parse_scheme("sgbw"), parse_scheme("phi:1"), parse_scheme("phi:5")};
  c.horizon = 30;
  c.n_trials = 20;
  c.seed = 7;
  c.schedule.max_iters = 100;
  c.probe_samples = 500;
  return c;
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) files[entry.path().filename().string()] = io::read_text(entry.path());
  return files;
}

}  // namespace

TEST_CASE("scheme names") {
  CHECK(parse_scheme("metropolis").kind == SchemeKind::Metropolis);
  CHECK(parse_scheme("mw").kind == SchemeKind::Metropolis);
  CHECK(parse_scheme("sgbw").kind == SchemeKind::Sgbw);
  const auto p = parse_scheme("phi:30");
  CHECK(p.kind == SchemeKind::Phi);
  CHECK(p.n == 30);
  CHECK(p.name() == "phi:30");
  CHECK(p.tag() == "phi30");
  CHECK(parse_scheme("psi:2").tag() == "psi2");
  CHECK_THROWS_AS(parse_scheme("phi"), Error);
  CHECK_THROWS_AS(parse_scheme("phi:x"), Error);
  CHECK_THROWS_AS(parse_scheme("phi:0"), Error);
  CHECK_THROWS_AS(parse_scheme("newton"), Error);
}

TEST_CASE("config validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  c.schemes.clear();
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.n_trials = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.schemes.push_back(parse_scheme("phi:20"));
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("config JSON round trip") {
  auto c = small_config();
  c.schedule.target_gap = 1e-7;
  c.static_network = true;
  const auto j = to_json(c);
  const auto back = config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.schemes == c.schemes);
  CHECK(back.static_network);
  CHECK(back.schedule.target_gap == c.schedule.target_gap);

  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"schemes":["phi:1"],"network":"maybe"})")), Error);
}

TEST_CASE("network files round trip") {
  Rng rng = derive_stream(3, Stream::Graph);
  auto gg = generate_with_edge_count(15, 30, rng);
  const auto p = assign_probabilities(gg.graph, 0.6, *gg.graph.radius());
  auto model = build_correlations(gg.graph, p, 0.2, 0.6);
  const auto dir = scratch("network");
  io::save_network(dir / "g.txt", dir / "c.txt", gg.graph, model);
  auto back = io::load_network(dir / "g.txt", dir / "c.txt");
  CHECK(back.graph.edges() == gg.graph.edges());
  CHECK(back.model.probs() == model.probs());
  CHECK((back.model.cross_cov() - model.cross_cov()).cwiseAbs().maxCoeff() == 0.0);

  std::istringstream bad("3 1\n1 4 0.5\n");
  CHECK_THROWS_AS(io::read_network(bad, nullptr), Error);
  std::istringstream truncated("3 2\n1 2 0.5\n");
  CHECK_THROWS_AS(io::read_network(truncated, nullptr), Error);
}

TEST_CASE("weights and trajectories round trip exactly") {
  const WeightVector w(std::vector<double>{0.1, 1.0 / 3.0, -2e-17});
  std::stringstream ws;
  io::write_weights(ws, w);
  CHECK(io::read_weights(ws) == w);

  ErrorTrajectory t;
  t.mse = {1.0, 0.5, 1.0 / 7.0};
  t.stderr_ = {0.0, 0.01, 0.003};
  std::stringstream ts;
  io::write_trajectory(ts, t);
  CHECK(ts.str().substr(0, 13) == "k,mse,stderr\n");
  auto back = io::read_trajectory(ts);
  CHECK(back.mse == t.mse);
  CHECK(back.stderr_ == t.stderr_);
}

TEST_CASE("thresholds and crossings") {
  CHECK(iterations_to_threshold({1.0, 0.5}, 1.0) == std::optional<int>(0));
  CHECK(iterations_to_threshold({2.0, 0.5, 0.01}, 0.1) == std::optional<int>(2));
  CHECK_FALSE(iterations_to_threshold({1.0, 0.5}, 0.1).has_value());
  CHECK_FALSE(first_crossing({1.0, 0.5, 0.2}, {1.0, 0.6, 0.3}).has_value());
  CHECK(first_crossing({1.0, 0.5, 0.2, 0.1}, {1.0, 0.6, 0.15, 0.05}) == std::optional<int>(2));

  ErrorTrajectory a, b;
  a.mse = {1.0, 0.4, 0.2, 0.09};
  b.mse = {1.0, 0.5, 0.1, 0.01};
  auto table = compare_report({{"a", a}, {"b", b}}, {0.1, 1e-3});
  CHECK(table.iterations_for("a", 0.1) == std::optional<int>(3));
  CHECK(table.iterations_for("b", 0.1) == std::optional<int>(2));
  CHECK_FALSE(table.iterations_for("b", 1e-3).has_value());
  REQUIRE(table.crossings.size() == 1);
  CHECK(table.crossings[0].k == std::optional<int>(2));
  CHECK(summary_csv(table) ==
        "scheme,threshold,iterations\na,0.10000000000000001,3\na,0.001,not reached\nb,0.10000000000000001,2\n"
        "b,0.001,not reached\n");
  CHECK(crossings_csv(table) == "scheme_a,scheme_b,crossing\na,b,2\n");
}

TEST_CASE("two-node toy experiment recovers w = 1/2") {
  ExperimentConfig c;
  c.graph.n_nodes = 2;
  c.graph.target_edges = 1;
  c.schemes = {parse_scheme("phi:1")};
  c.horizon = 5;
  c.n_trials = 3;
  c.probe_samples = 100;
  const auto dir = scratch("toy");
  c.output_dir = dir.string();
  run_experiment(c);
  const auto w = io::load_weights(dir / "weights_phi1.txt");
  REQUIRE(w.size() == 1);
  CHECK(std::abs(w[0] - 0.5) < 1e-3);
}

TEST_CASE("pipeline outputs are complete, consistent and deterministic") {
  auto c = small_config();
  const auto d1 = scratch("run1");
  const auto d2 = scratch("run2");
  c.output_dir = d1.string();
  auto report = run_experiment(c);
  for (const char* name : {"config.json", "graph.txt", "correlations.txt", "summary.csv", "crossings.csv", "report.txt",
                           "weights_metropolis.txt", "spectrum_sgbw.csv", "trajectory_phi5.csv", "trace_phi1.csv"})
    CHECK_MESSAGE(fs::exists(d1 / name), name);

  // Summary entries re-derived from the emitted trajectories.
  for (const auto& outcome : report.outcomes) {
    std::ifstream in(d1 / ("trajectory_" + outcome.scheme.tag() + ".csv"));
    const auto traj = io::read_trajectory(in);
    for (double th : c.thresholds) {
      std::optional<int> scan;
      for (std::size_t k = 0; k < traj.mse.size() && !scan; ++k)
        if (traj.mse[k] / traj.mse[0] <= th) scan = static_cast<int>(k);
      CHECK(report.table.iterations_for(outcome.scheme.name(), th) == scan);
    }
  }

  // Second run from the echoed config.
  auto echoed = load_config(d1 / "config.json");
  echoed.output_dir = d2.string();
  run_experiment(echoed);
  auto a = read_dir(d1);
  auto b = read_dir(d2);
  a.erase("config.json");
  b.erase("config.json");
  CHECK(a == b);
}

TEST_CASE("loaded networks resolve relative to the config") {
  const auto dir = scratch("load");
  Rng rng = derive_stream(2, Stream::Graph);
  auto gg = generate_with_edge_count(10, 20, rng);
  const auto p = assign_probabilities(gg.graph, 0.6, *gg.graph.radius());
  io::save_network(dir / "g.txt", dir / "c.txt", gg.graph, build_correlations(gg.graph, p, 0.2, 0.6));
  io::write_text(dir / "cfg.json",
                 R"({"graph":{"source":"load","graph_file":"g.txt","correlation_file":"c.txt"},"schemes":["mw"]})");
  auto c = load_config(dir / "cfg.json");
  auto net = build_network(c);
  CHECK(net.graph.num_edges() == 20);
  CHECK_FALSE(net.model.off_diagonal().empty());
}

TEST_CASE("missing config file is an IO error") {
  try {
    (void)load_config("/nonexistent/cwopt.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

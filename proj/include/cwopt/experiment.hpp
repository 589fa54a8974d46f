#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cwopt/netsim.hpp"
#include "cwopt/optimizer.hpp"
#include "cwopt/supergraph.hpp"

namespace cwopt {

enum class SchemeKind { Metropolis, Sgbw, Phi, Psi };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::Metropolis;
  int n = 0;  // eigenvalue count for Phi / Psi

  /// "metropolis", "sgbw", "phi:30", ...
  std::string name() const;
  /// File-name tag: "metropolis", "sgbw", "phi30", ...
  std::string tag() const;
  friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

SchemeSpec parse_scheme(const std::string& text);

struct GraphSource {
  bool load = false;
  // generate
  int n_nodes = 120;
  std::size_t target_edges = 449;
  double c1 = 0.6;
  double c2 = 0.2;
  int max_attempts = 1000;
  // load
  std::string graph_file;
  std::string correlation_file;
};

struct ExperimentConfig {
  GraphSource graph;
  std::vector<SchemeSpec> schemes;
  /// Treat the supergraph as static (every link always on).
  bool static_network = false;
  int horizon = 100;
  std::size_t n_trials = 100;
  std::uint64_t seed = 1;
  SubgradientSchedule schedule;
  std::vector<double> thresholds{1e-2, 1e-3};
  std::size_t probe_samples = 10000;
  unsigned workers = 1;
  std::string output_dir;

  /// Checks the config against a network with `n_nodes` nodes (0 skips the
  /// per-index range check).
  void validate(int n_nodes = 0) const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Network {
  Supergraph graph;
  LinkStatModel model;
};

/// Generated (seeded) or loaded network for the config's graph source.
Network build_network(const ExperimentConfig& config);

struct ComparisonTable {
  struct Crossing {
    std::string a;
    std::string b;
    std::optional<int> k;
  };

  std::vector<std::string> schemes;
  std::vector<double> thresholds;
  /// iterations[s][t]: smallest k with mse[k]/mse[0] <= thresholds[t].
  std::vector<std::vector<std::optional<int>>> iterations;
  std::vector<Crossing> crossings;

  std::optional<int> iterations_for(const std::string& scheme, double threshold) const;
};

/// Smallest k with mse[k] / mse[0] <= threshold.
std::optional<int> iterations_to_threshold(const std::vector<double>& mse, double threshold);

/// First k at which curve ordering flips relative to the first k where the
/// curves differ.
std::optional<int> first_crossing(const std::vector<double>& a, const std::vector<double>& b);

ComparisonTable compare_report(const std::vector<std::pair<std::string, ErrorTrajectory>>& trajectories,
                               const std::vector<double>& thresholds);

std::string summary_csv(const ComparisonTable& table);
std::string crossings_csv(const ComparisonTable& table);

struct SchemeOutcome {
  SchemeSpec scheme;
  WeightVector weights;
  ErrorTrajectory trajectory;
  Eigen::VectorXd spectrum;  // eigenvalues of E[W^2] - J, descending
  double phi1 = 0.0;
  double r_as = 0.0;
  std::optional<OptimizationResult> optimization;
};

struct ExperimentReport {
  ExperimentConfig config;
  Network network;
  ValidityReport validity;
  std::vector<SchemeOutcome> outcomes;
  ComparisonTable table;
  std::string report_text;
};

/// Full pipeline. Writes every output file when config.output_dir is set.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace cwopt

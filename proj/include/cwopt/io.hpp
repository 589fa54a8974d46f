#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cwopt/moments.hpp"
#include "cwopt/netsim.hpp"
#include "cwopt/optimizer.hpp"
#include "cwopt/supergraph.hpp"

namespace cwopt::io {

struct NetworkFiles {
  Supergraph graph;
  LinkStatModel model;
};

// Graph file: "N M", then M lines "i j P" (1-based, i < j).
// Correlation file: lines "e f R" (1-based edge indices, e < f), nonzero entries only.
void write_graph(std::ostream& out, const Supergraph& graph, const LinkStatModel& model);
void write_correlations(std::ostream& out, const LinkStatModel& model);
NetworkFiles read_network(std::istream& graph_in, std::istream* correlations_in);

void save_network(const std::filesystem::path& graph_path, const std::filesystem::path& corr_path,
                  const Supergraph& graph, const LinkStatModel& model);
NetworkFiles load_network(const std::filesystem::path& graph_path, const std::filesystem::path& corr_path);

// Weight file: M lines "e W_e", 17 significant digits.
void write_weights(std::ostream& out, const WeightVector& weights);
WeightVector read_weights(std::istream& in);
void save_weights(const std::filesystem::path& path, const WeightVector& weights);
WeightVector load_weights(const std::filesystem::path& path);

// "k,mse,stderr"
void write_trajectory(std::ostream& out, const ErrorTrajectory& traj);
ErrorTrajectory read_trajectory(std::istream& in);

// "iter,value,feasible,step"
void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace);

// "index,eigenvalue"
void write_spectrum(std::ostream& out, const Eigen::VectorXd& eigenvalues);

/// Round-trip decimal form ("%.17g").
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace cwopt::io

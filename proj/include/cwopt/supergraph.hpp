#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cwopt/rng.hpp"

namespace cwopt {

/// Undirected link {i, j} with 0-based node indices, i < j.
struct Edge {
  int i = 0;
  int j = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// The topology collecting every link with nonzero activation probability.
///
/// Edges are stored in canonical (lexicographic) order; the position of an edge
/// in `edges()` is its index everywhere else in the library (weights, models,
/// files). Construction validates and canonicalizes the edge list.
class Supergraph {
public:
  Supergraph() = default;
  Supergraph(int n_nodes, std::vector<Edge> edges, std::optional<std::vector<Point>> coordinates = {},
             std::optional<double> radius = {});

  int num_nodes() const noexcept { return n_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }

  bool has_coordinates() const noexcept { return coordinates_.has_value(); }
  const std::vector<Point>& coordinates() const;
  /// Radius used at generation, when the graph is geometric.
  std::optional<double> radius() const noexcept { return radius_; }

  /// Edge indices incident to each node.
  const std::vector<std::vector<std::size_t>>& incident() const noexcept { return incident_; }
  std::vector<int> degrees() const;
  bool is_connected() const;

  /// Index of edge {i, j} (any order), or nullopt.
  std::optional<std::size_t> find_edge(int i, int j) const;

private:
  int n_nodes_ = 0;
  std::vector<Edge> edges_;
  std::optional<std::vector<Point>> coordinates_;
  std::optional<double> radius_;
  std::vector<std::vector<std::size_t>> incident_;
};

struct GeometricGraph {
  Supergraph graph;
  bool connected = false;
};

/// Nodes i.i.d. uniform on the unit square, edge iff distance < radius.
GeometricGraph generate_geometric(int n_nodes, double radius, Rng& rng);

/// Same rule as generate_geometric on caller-supplied positions.
GeometricGraph geometric_from_points(std::vector<Point> points, double radius);

struct EdgeCountOptions {
  int max_attempts = 1000;
  bool require_connected = true;
};

/// Draws node positions and picks the radius (bisection over the sorted pair
/// distances) giving exactly `target_edges` edges; resamples positions until
/// the graph is connected when requested.
GeometricGraph generate_with_edge_count(int n_nodes, std::size_t target_edges, Rng& rng,
                                        const EdgeCountOptions& options = {});

/// P_e = 1 - c1 (d_e / r)^2 for each edge.
std::vector<double> assign_probabilities(const Supergraph& graph, double c1, double radius);

struct ModelParams {
  double c1 = 0.0;
  double c2 = 0.0;
  double radius = 0.0;
};

struct CovarianceEntry {
  std::size_t e = 0;
  std::size_t f = 0;
  double value = 0.0;
};

/// Per-edge activation probabilities and the M x M link covariance matrix Γ,
/// with Γ_ee = P_e (1 - P_e) and Γ_ef = R_ef.
class LinkStatModel {
public:
  LinkStatModel() = default;
  /// `cross` lists off-diagonal entries (e != f); each unordered pair at most once.
  LinkStatModel(std::vector<double> probs, std::span<const CovarianceEntry> cross,
                std::optional<ModelParams> params = {});

  /// P = 1 and Γ = 0 on every edge: the static network.
  static LinkStatModel deterministic(std::size_t n_edges);

  std::size_t num_edges() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double prob(std::size_t e) const { return probs_.at(e); }
  const Eigen::MatrixXd& cross_cov() const noexcept { return cov_; }
  /// Nonzero off-diagonal entries with e < f, row-major order.
  const std::vector<CovarianceEntry>& off_diagonal() const noexcept { return off_diag_; }
  const std::optional<ModelParams>& params() const noexcept { return params_; }
  bool is_deterministic() const;

private:
  std::vector<double> probs_;
  Eigen::MatrixXd cov_;
  std::vector<CovarianceEntry> off_diag_;
  std::optional<ModelParams> params_;
};

/// Pairs of distinct edges sharing a node get R = c2 * Pmin * (1 - Pmax);
/// every other off-diagonal entry is zero.
LinkStatModel build_correlations(const Supergraph& graph, std::span<const double> probs, double c2,
                                 std::optional<double> c1 = {});

struct ValidityReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
  std::size_t cauchy_schwarz_violations = 0;
  /// Fraction of conditional means outside [0,1] under the sampler; only
  /// probed when the PSD check passes.
  std::optional<double> clamp_fraction;
  std::size_t probe_samples = 0;
};

/// Implemented alongside the topology sampler, which it probes.
ValidityReport validate_model(const LinkStatModel& model, std::size_t probe_samples = 10000,
                              std::uint64_t seed = 0);

}  // namespace cwopt

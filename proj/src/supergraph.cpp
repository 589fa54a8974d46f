#include "cwopt/supergraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cwopt/error.hpp"

namespace cwopt {

namespace {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<Point> uniform_points(int n_nodes, Rng& rng) {
  std::vector<Point> points(static_cast<std::size_t>(n_nodes));
  for (auto& p : points) {
    p.x = uniform01(rng);
    p.y = uniform01(rng);
  }
  return points;
}

}  // namespace

Supergraph::Supergraph(int n_nodes, std::vector<Edge> edges, std::optional<std::vector<Point>> coordinates,
                       std::optional<double> radius)
    : n_nodes_(n_nodes), edges_(std::move(edges)), coordinates_(std::move(coordinates)), radius_(radius) {
  require(n_nodes_ >= 1, "supergraph needs at least one node");
  for (auto& e : edges_) {
    if (e.i > e.j) std::swap(e.i, e.j);
    require(e.i >= 0 && e.j < n_nodes_, "edge endpoint out of range");
    require(e.i != e.j, "self-loops are not allowed");
  }
  std::sort(edges_.begin(), edges_.end());
  require(std::adjacent_find(edges_.begin(), edges_.end()) == edges_.end(), "duplicate edge");
  if (coordinates_) {
    require(coordinates_->size() == static_cast<std::size_t>(n_nodes_), "one coordinate per node required");
  }

  incident_.assign(static_cast<std::size_t>(n_nodes_), {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    incident_[static_cast<std::size_t>(edges_[k].i)].push_back(k);
    incident_[static_cast<std::size_t>(edges_[k].j)].push_back(k);
  }
}

const std::vector<Point>& Supergraph::coordinates() const {
  if (!coordinates_) fail(ErrorCode::MissingCoordinates, "graph has no node coordinates");
  return *coordinates_;
}

std::vector<int> Supergraph::degrees() const {
  std::vector<int> d;
  d.reserve(incident_.size());
  for (const auto& inc : incident_) d.push_back(static_cast<int>(inc.size()));
  return d;
}

bool Supergraph::is_connected() const {
  if (n_nodes_ <= 1) return true;
  std::vector<char> seen(static_cast<std::size_t>(n_nodes_), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (std::size_t k : incident_[static_cast<std::size_t>(v)]) {
      const int u = edges_[k].i == v ? edges_[k].j : edges_[k].i;
      if (!seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  return reached == n_nodes_;
}

std::optional<std::size_t> Supergraph::find_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  const Edge key{i, j};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

GeometricGraph geometric_from_points(std::vector<Point> points, double radius) {
  require(points.size() >= 2, "geometric graph needs at least two nodes");
  require(radius > 0.0, "radius must be positive");
  std::vector<Edge> edges;
  const int n = static_cast<int>(points.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (distance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]) < radius)
        edges.push_back({i, j});
  GeometricGraph out;
  out.graph = Supergraph(n, std::move(edges), std::move(points), radius);
  out.connected = out.graph.is_connected();
  return out;
}

GeometricGraph generate_geometric(int n_nodes, double radius, Rng& rng) {
  require(n_nodes >= 2, "geometric graph needs at least two nodes");
  require(radius > 0.0, "radius must be positive");
  return geometric_from_points(uniform_points(n_nodes, rng), radius);
}

GeometricGraph generate_with_edge_count(int n_nodes, std::size_t target_edges, Rng& rng,
                                        const EdgeCountOptions& options) {
  require(n_nodes >= 2, "geometric graph needs at least two nodes");
  const std::size_t max_edges = static_cast<std::size_t>(n_nodes) * static_cast<std::size_t>(n_nodes - 1) / 2;
  require(target_edges >= 1 && target_edges <= max_edges, "target edge count out of range");

  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    auto points = uniform_points(n_nodes, rng);
    std::vector<double> dist;
    dist.reserve(max_edges);
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j) dist.push_back(distance(points[i], points[j]));
    std::sort(dist.begin(), dist.end());

    // Edge count is a step function of the radius. Any radius strictly between
    // the target_edges-th and next sorted distance gives exactly target_edges.
    const double lo = dist[target_edges - 1];
    const double hi = target_edges < dist.size() ? dist[target_edges] : lo + 1.0;
    if (!(hi > lo)) continue;  // tie at the threshold, resample
    const double radius = 0.5 * (lo + hi);

    auto candidate = geometric_from_points(std::move(points), radius);
    if (candidate.graph.num_edges() != target_edges) continue;
    if (options.require_connected && !candidate.connected) continue;
    return candidate;
  }
  std::ostringstream msg;
  msg << "no connected geometric graph with " << target_edges << " edges after " << options.max_attempts
      << " attempts";
  fail(ErrorCode::Disconnected, msg.str());
}

std::vector<double> assign_probabilities(const Supergraph& graph, double c1, double radius) {
  require(c1 >= 0.0 && c1 < 1.0, "c1 must lie in [0,1)");
  require(radius > 0.0, "radius must be positive");
  if (!graph.has_coordinates())
    fail(ErrorCode::MissingCoordinates, "graph has no coordinates; supply link probabilities externally");
  const auto& pts = graph.coordinates();
  std::vector<double> probs;
  probs.reserve(graph.num_edges());
  for (const auto& e : graph.edges()) {
    const double ratio = distance(pts[static_cast<std::size_t>(e.i)], pts[static_cast<std::size_t>(e.j)]) / radius;
    probs.push_back(1.0 - c1 * ratio * ratio);
  }
  return probs;
}

LinkStatModel::LinkStatModel(std::vector<double> probs, std::span<const CovarianceEntry> cross,
                             std::optional<ModelParams> params)
    : probs_(std::move(probs)), params_(params) {
  const auto m = static_cast<Eigen::Index>(probs_.size());
  cov_ = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index e = 0; e < m; ++e) {
    const double p = probs_[static_cast<std::size_t>(e)];
    require(std::isfinite(p) && p > 0.0 && p <= 1.0, "link probabilities must lie in (0,1]");
    cov_(e, e) = p * (1.0 - p);
  }
  for (const auto& c : cross) {
    require(c.e < probs_.size() && c.f < probs_.size(), "covariance entry edge index out of range");
    require(c.e != c.f, "covariance entries must be off-diagonal");
    require(std::isfinite(c.value), "covariance entries must be finite");
    const auto e = static_cast<Eigen::Index>(c.e);
    const auto f = static_cast<Eigen::Index>(c.f);
    require(cov_(e, f) == 0.0, "duplicate covariance entry");
    cov_(e, f) = c.value;
    cov_(f, e) = c.value;
  }
  for (Eigen::Index e = 0; e < m; ++e)
    for (Eigen::Index f = e + 1; f < m; ++f)
      if (cov_(e, f) != 0.0)
        off_diag_.push_back({static_cast<std::size_t>(e), static_cast<std::size_t>(f), cov_(e, f)});
}

LinkStatModel LinkStatModel::deterministic(std::size_t n_edges) {
  return LinkStatModel(std::vector<double>(n_edges, 1.0), {}, ModelParams{0.0, 0.0, 0.0});
}

bool LinkStatModel::is_deterministic() const {
  return std::all_of(probs_.begin(), probs_.end(), [](double p) { return p == 1.0; }) && off_diag_.empty();
}

LinkStatModel build_correlations(const Supergraph& graph, std::span<const double> probs, double c2,
                                 std::optional<double> c1) {
  require(probs.size() == graph.num_edges(), "one probability per edge required");
  require(c2 >= 0.0 && c2 < 1.0, "c2 must lie in [0,1)");
  std::vector<CovarianceEntry> cross;
  if (c2 > 0.0) {
    for (const auto& inc : graph.incident()) {
      for (std::size_t a = 0; a < inc.size(); ++a) {
        for (std::size_t b = a + 1; b < inc.size(); ++b) {
          const std::size_t e = std::min(inc[a], inc[b]);
          const std::size_t f = std::max(inc[a], inc[b]);
          const double pmin = std::min(probs[e], probs[f]);
          const double pmax = std::max(probs[e], probs[f]);
          const double r = c2 * pmin * (1.0 - pmax);
          if (r != 0.0) cross.push_back({e, f, r});
        }
      }
    }
  }
  ModelParams params{c1.value_or(0.0), c2, graph.radius().value_or(0.0)};
  return LinkStatModel(std::vector<double>(probs.begin(), probs.end()), cross, params);
}

}  // namespace cwopt

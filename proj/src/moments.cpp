#include "cwopt/moments.hpp"

#include <cmath>

#include <Eigen/Sparse>

#include "cwopt/error.hpp"
#include "cwopt/netsim.hpp"

namespace cwopt {

namespace {

void check_sizes(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph) {
  require(weights.size() == graph.num_edges(), "weight vector length must equal the edge count");
  require(model.num_edges() == graph.num_edges(), "link model and graph disagree on the edge count");
}

// a_e^T a_f for a_e = u_i - u_j.
double edge_dot(const Edge& a, const Edge& b) {
  auto u = [](const Edge& e, int node) { return (e.i == node ? 1.0 : 0.0) - (e.j == node ? 1.0 : 0.0); };
  return u(a, b.i) - u(a, b.j);
}

// target += c * a_e a_f^T
void add_outer(Eigen::MatrixXd& target, const Edge& a, const Edge& b, double c) {
  target(a.i, b.i) += c;
  target(a.i, b.j) -= c;
  target(a.j, b.i) -= c;
  target(a.j, b.j) += c;
}

Eigen::MatrixXd averaging_projector(int n) {
  return Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
}

Eigen::VectorXd expected_coeffs(const WeightVector& weights, const LinkStatModel& model) {
  Eigen::VectorXd c(weights.values().size());
  for (Eigen::Index e = 0; e < c.size(); ++e) c(e) = model.prob(static_cast<std::size_t>(e)) * weights.values()(e);
  return c;
}

}  // namespace

WeightVector::WeightVector(Eigen::VectorXd values) : values_(std::move(values)) {
  require(values_.allFinite(), "weights must be finite");
}

WeightVector::WeightVector(std::span<const double> values)
    : WeightVector(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))) {}

Eigen::MatrixXd edge_outer(const Supergraph& graph, std::size_t e) {
  const Edge& edge = graph.edge(e);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(graph.num_nodes(), graph.num_nodes());
  add_outer(a, edge, edge, 1.0);
  return a;
}

Eigen::MatrixXd weighted_laplacian(const Supergraph& graph, const Eigen::VectorXd& coeffs) {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(graph.num_nodes(), graph.num_nodes());
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const double c = coeffs(static_cast<Eigen::Index>(e));
    if (c != 0.0) add_outer(lap, graph.edge(e), graph.edge(e), c);
  }
  return lap;
}

Eigen::MatrixXd realized_state_matrix(const WeightVector& weights, std::span<const char> active,
                                      const Supergraph& graph) {
  require(weights.size() == graph.num_edges(), "weight vector length must equal the edge count");
  require(active.size() == graph.num_edges(), "one activity flag per edge required");
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(graph.num_nodes(), graph.num_nodes());
  for (std::size_t e = 0; e < graph.num_edges(); ++e)
    if (active[e]) add_outer(w, graph.edge(e), graph.edge(e), -weights[e]);
  return w;
}

Eigen::MatrixXd expected_W(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph) {
  check_sizes(weights, model, graph);
  const Eigen::Index n = graph.num_nodes();
  return Eigen::MatrixXd::Identity(n, n) - weighted_laplacian(graph, expected_coeffs(weights, model));
}

MomentMatrix error_moment_matrix(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph) {
  check_sizes(weights, model, graph);
  const int n = graph.num_nodes();
  const Eigen::MatrixXd lap = weighted_laplacian(graph, expected_coeffs(weights, model));

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - 2.0 * lap;
  m.noalias() += lap * lap;

  // Covariance correction: diagonal terms use A_e^2 = 2 A_e.
  const auto& cov = model.cross_cov();
  const auto& w = weights.values();
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const auto ei = static_cast<Eigen::Index>(e);
    const double c = cov(ei, ei) * w(ei) * w(ei);
    if (c != 0.0) add_outer(m, graph.edge(e), graph.edge(e), 2.0 * c);
  }
  for (const auto& entry : model.off_diagonal()) {
    const Edge& a = graph.edge(entry.e);
    const Edge& b = graph.edge(entry.f);
    const double c = entry.value * w(static_cast<Eigen::Index>(entry.e)) * w(static_cast<Eigen::Index>(entry.f)) *
                     edge_dot(a, b);
    if (c == 0.0) continue;
    add_outer(m, a, b, c);
    add_outer(m, b, a, c);
  }

  m -= averaging_projector(n);
  MomentMatrix out;
  out.m = 0.5 * (m + m.transpose());
  return out;
}

Eigen::MatrixXd moment_derivative(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph,
                                  std::size_t e) {
  check_sizes(weights, model, graph);
  require(e < graph.num_edges(), "edge index out of range");
  const Eigen::MatrixXd lap = weighted_laplacian(graph, expected_coeffs(weights, model));
  const Eigen::MatrixXd ae = edge_outer(graph, e);
  const double pe = model.prob(e);

  Eigen::MatrixXd d = -2.0 * pe * ae;
  d.noalias() += pe * (ae * lap + lap * ae);

  const auto& cov = model.cross_cov();
  const auto& w = weights.values();
  const auto ei = static_cast<Eigen::Index>(e);
  const Edge& a = graph.edge(e);
  for (std::size_t f = 0; f < graph.num_edges(); ++f) {
    const auto fi = static_cast<Eigen::Index>(f);
    const double g = cov(ei, fi);
    if (g == 0.0) continue;
    const Edge& b = graph.edge(f);
    const double c = g * w(fi) * edge_dot(a, b);
    add_outer(d, a, b, c);
    add_outer(d, b, a, c);
  }
  return 0.5 * (d + d.transpose());
}

Eigen::VectorXd moment_gradient_contraction(const WeightVector& weights, const LinkStatModel& model,
                                            const Supergraph& graph, const Eigen::MatrixXd& basis) {
  check_sizes(weights, model, graph);
  require(basis.rows() == graph.num_nodes(), "basis row count must equal the node count");
  const Eigen::MatrixXd lap = weighted_laplacian(graph, expected_coeffs(weights, model));
  const Eigen::MatrixXd lap_basis = lap * basis;
  const auto& w = weights.values();
  const auto& cov = model.cross_cov();
  const auto m = static_cast<Eigen::Index>(graph.num_edges());

  // Rows of a_e^T Y and a_e^T L Y.
  Eigen::MatrixXd ay(m, basis.cols());
  Eigen::MatrixXd aly(m, basis.cols());
  for (Eigen::Index e = 0; e < m; ++e) {
    const Edge& edge = graph.edge(static_cast<std::size_t>(e));
    ay.row(e) = basis.row(edge.i) - basis.row(edge.j);
    aly.row(e) = lap_basis.row(edge.i) - lap_basis.row(edge.j);
  }

  Eigen::VectorXd g(m);
  for (Eigen::Index e = 0; e < m; ++e) {
    const double pe = model.prob(static_cast<std::size_t>(e));
    const double quad = ay.row(e).squaredNorm();    // a_e^T G a_e
    const double mixed = aly.row(e).dot(ay.row(e));  // a_e^T L G a_e
    // The Γ_ee term of the covariance sum: 4 Γ_ee W_e a_e^T G a_e.
    g(e) = -2.0 * pe * quad + 2.0 * pe * mixed + 4.0 * cov(e, e) * w(e) * quad;
  }
  for (const auto& entry : model.off_diagonal()) {
    const auto e = static_cast<Eigen::Index>(entry.e);
    const auto f = static_cast<Eigen::Index>(entry.f);
    const double coupling =
        2.0 * entry.value * edge_dot(graph.edge(entry.e), graph.edge(entry.f)) * ay.row(e).dot(ay.row(f));
    g(e) += coupling * w(f);
    g(f) += coupling * w(e);
  }
  return g;
}

MomentEstimate monte_carlo_moment_oracle(const WeightVector& weights, const LinkStatModel& model,
                                         const Supergraph& graph, std::size_t n_samples, std::uint64_t seed) {
  check_sizes(weights, model, graph);
  require(n_samples >= 1, "at least one sample required");
  const TopologySampler sampler = build_sampler(model);
  Rng rng = derive_stream(seed, Stream::Oracle);
  const int n = graph.num_nodes();

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(n, n);
  std::vector<char> active;
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t s = 0; s < n_samples; ++s) {
    sample_topology(sampler, rng, active);
    triplets.clear();
    for (int v = 0; v < n; ++v) triplets.emplace_back(v, v, 1.0);
    for (std::size_t e = 0; e < graph.num_edges(); ++e) {
      if (!active[e]) continue;
      const Edge& edge = graph.edge(e);
      const double we = weights[e];
      triplets.emplace_back(edge.i, edge.i, -we);
      triplets.emplace_back(edge.j, edge.j, -we);
      triplets.emplace_back(edge.i, edge.j, we);
      triplets.emplace_back(edge.j, edge.i, we);
    }
    Eigen::SparseMatrix<double> w(n, n);
    w.setFromTriplets(triplets.begin(), triplets.end());
    const Eigen::SparseMatrix<double> w2 = w * w;
    for (int k = 0; k < w2.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(w2, k); it; ++it) {
        sum(it.row(), it.col()) += it.value();
        sum_sq(it.row(), it.col()) += it.value() * it.value();
      }
    }
  }
  const auto count = static_cast<double>(n_samples);
  MomentEstimate out;
  out.n_samples = n_samples;
  out.mean = sum / count;
  out.stderr_ = Eigen::MatrixXd::Zero(n, n);
  if (n_samples > 1) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double var = std::max(0.0, (sum_sq(i, j) - count * out.mean(i, j) * out.mean(i, j)) / (count - 1.0));
        out.stderr_(i, j) = std::sqrt(var / count);
      }
  }
  return out;
}

}  // namespace cwopt

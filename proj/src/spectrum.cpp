#include "cwopt/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cwopt/error.hpp"

namespace cwopt {

namespace {

void check_index(int n, const Supergraph& graph) {
  require(n >= 1 && n <= graph.num_nodes() - 1, "eigenvalue count n must lie in 1..N-1");
}

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index idx = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&idx);
    if (vectors(idx, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

}  // namespace

SpectralDecomposition sym_eig(const Eigen::MatrixXd& matrix) {
  require(matrix.rows() == matrix.cols() && matrix.rows() >= 1, "sym_eig needs a nonempty square matrix");
  const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    std::ostringstream msg;
    msg << "matrix is not symmetric (max asymmetry " << asym << ")";
    fail(ErrorCode::NotSymmetric, msg.str());
  }
  const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) fail(ErrorCode::InvalidArgument, "eigendecomposition did not converge");

  // Eigen returns ascending order.
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  fix_signs(out.eigenvectors);
  return out;
}

SpectralEvaluation evaluate_spectrum(const WeightVector& weights, const LinkStatModel& model,
                                     const Supergraph& graph, int n) {
  check_index(n, graph);
  auto dec = sym_eig(error_moment_matrix(weights, model, graph).m);
  SpectralEvaluation eval;
  eval.phi1 = dec.eigenvalues(0);
  eval.phin = dec.eigenvalues.head(n).sum();
  eval.gap = dec.eigenvalues(n - 1) - dec.eigenvalues(n);
  eval.eigenvalues = std::move(dec.eigenvalues);
  eval.eigenvectors = std::move(dec.eigenvectors);
  return eval;
}

Eigen::VectorXd ky_fan_subgradient(const SpectralEvaluation& eval, const WeightVector& weights,
                                   const LinkStatModel& model, const Supergraph& graph, int count) {
  check_index(count, graph);
  return moment_gradient_contraction(weights, model, graph, eval.eigenvectors.leftCols(count));
}

double phi_n(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph, int n) {
  return evaluate_spectrum(weights, model, graph, n).phin;
}

double psi_n(const WeightVector& weights, const Supergraph& graph, int n) {
  return phi_n(weights, LinkStatModel::deterministic(graph.num_edges()), graph, n);
}

Eigen::VectorXd subgrad_phi_n(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph,
                              int n) {
  const auto eval = evaluate_spectrum(weights, model, graph, n);
  return ky_fan_subgradient(eval, weights, model, graph, n);
}

RateReport rates(const WeightVector& weights, const Supergraph& graph, const LinkStatModel& model) {
  const int n = graph.num_nodes();
  const std::vector<char> all(graph.num_edges(), 1);
  const Eigen::MatrixXd static_err =
      realized_state_matrix(weights, all, graph) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const auto stat = sym_eig(static_err);

  RateReport report;
  report.r_as = stat.eigenvalues.cwiseAbs().maxCoeff();
  report.r_step = report.r_as;
  report.phi1 = sym_eig(error_moment_matrix(weights, model, graph).m).eigenvalues(0);
  report.ms_bound = report.phi1 > 0.0 ? 0.5 * std::log(report.phi1) : -std::numeric_limits<double>::infinity();
  // Tolerance absorbs rounding at the boundary (w = 0 gives lambda_1 = 1 exactly).
  report.feasible = report.phi1 < 1.0 - 1e-12;
  return report;
}

Eigen::VectorXd mode_decomposition(const WeightVector& weights, const Supergraph& graph,
                                   std::span<const double> e0, int k) {
  const int n = graph.num_nodes();
  require(e0.size() == static_cast<std::size_t>(n), "e0 length must equal the node count");
  require(k >= 0, "k must be nonnegative");
  const Eigen::Map<const Eigen::VectorXd> err(e0.data(), n);
  if (std::abs(err.sum()) > 1e-10 * std::sqrt(static_cast<double>(n)))
    fail(ErrorCode::InvalidArgument, "e0 must be orthogonal to the all-ones vector");

  // Push the consensus direction to an isolated eigenvalue below the rest so
  // it separates cleanly from any other zero modes of W - J.
  const std::vector<char> all(graph.num_edges(), 1);
  const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd err_matrix = realized_state_matrix(weights, all, graph) - j;
  const double shift = 1.0 + 2.0 * err_matrix.norm();
  const auto dec = sym_eig(err_matrix - shift * j);

  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i + 1 < n; ++i) order.push_back(i);  // drop the last (shifted) pair
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(dec.eigenvalues(a)) > std::abs(dec.eigenvalues(b));
  });

  Eigen::VectorXd zeta(n - 1);
  for (Eigen::Index r = 0; r < n - 1; ++r) {
    const Eigen::Index i = order[static_cast<std::size_t>(r)];
    zeta(r) = std::pow(dec.eigenvalues(i), k) * dec.eigenvectors.col(i).dot(err);
  }
  return zeta;
}

}  // namespace cwopt

#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "cwopt/moments.hpp"
#include "cwopt/supergraph.hpp"

namespace cwopt {

struct SpectralDecomposition {
  /// Descending.
  Eigen::VectorXd eigenvalues;
  /// Column i pairs with eigenvalue i; each column's largest-magnitude
  /// component is positive.
  Eigen::MatrixXd eigenvectors;
};

/// Symmetric eigendecomposition. Throws NotSymmetric if the input is
/// asymmetric beyond 1e-10.
SpectralDecomposition sym_eig(const Eigen::MatrixXd& matrix);

/// Sum of the n largest eigenvalues of E[W^2] - J.
double phi_n(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph, int n);

/// phi_n on the static network (P = 1, Γ = 0): sum of the n largest λ_i^2(W - J).
double psi_n(const WeightVector& weights, const Supergraph& graph, int n);

/// Ky Fan subgradient of phi_n: g_e = trace(Q_n Q_n^T ∂M/∂W_e).
Eigen::VectorXd subgrad_phi_n(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph,
                              int n);

/// One decomposition serving the objective, the feasibility value and the
/// subgradient of whichever function the caller steps along.
struct SpectralEvaluation {
  double phi1 = 0.0;
  double phin = 0.0;
  /// λ_n - λ_{n+1} of M.
  double gap = 0.0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

SpectralEvaluation evaluate_spectrum(const WeightVector& weights, const LinkStatModel& model,
                                     const Supergraph& graph, int n);

/// Subgradient of the sum of the top-`count` eigenvalues, from a decomposition
/// already computed for these weights.
Eigen::VectorXd ky_fan_subgradient(const SpectralEvaluation& eval, const WeightVector& weights,
                                   const LinkStatModel& model, const Supergraph& graph, int count);

struct RateReport {
  double r_as = 0.0;
  double r_step = 0.0;
  double phi1 = 0.0;
  /// 0.5 ln λ_1(M); -inf when λ_1(M) = 0.
  double ms_bound = 0.0;
  bool feasible = false;
};

RateReport rates(const WeightVector& weights, const Supergraph& graph, const LinkStatModel& model);

/// ζ_i(k) = λ_i^k (q_i^T e0) for the eigenpairs of the static W - J, ordered
/// by descending |λ_i|, excluding the consensus direction (N - 1 entries).
Eigen::VectorXd mode_decomposition(const WeightVector& weights, const Supergraph& graph,
                                   std::span<const double> e0, int k);

}  // namespace cwopt

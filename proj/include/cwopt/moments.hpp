#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cwopt/supergraph.hpp"

namespace cwopt {

/// One weight per supergraph edge, in canonical edge order.
class WeightVector {
public:
  WeightVector() = default;
  explicit WeightVector(Eigen::VectorXd values);
  explicit WeightVector(std::span<const double> values);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t e) const { return values_(static_cast<Eigen::Index>(e)); }
  const Eigen::VectorXd& values() const noexcept { return values_; }

  friend bool operator==(const WeightVector& a, const WeightVector& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

private:
  Eigen::VectorXd values_;
};

/// E[W^2] - J for a (weights, model) pair.
struct MomentMatrix {
  Eigen::MatrixXd m;
};

/// (u_i - u_j)(u_i - u_j)^T for edge e.
Eigen::MatrixXd edge_outer(const Supergraph& graph, std::size_t e);

/// W = I - sum over active edges of W_e A_e. `active` holds one flag per edge.
Eigen::MatrixXd realized_state_matrix(const WeightVector& weights, std::span<const char> active,
                                      const Supergraph& graph);

/// Laplacian sum_e c_e A_e with per-edge coefficients c.
Eigen::MatrixXd weighted_laplacian(const Supergraph& graph, const Eigen::VectorXd& coeffs);

/// E[W] = I - sum_e P_e W_e A_e.
Eigen::MatrixXd expected_W(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph);

/// M = I - 2 L_P + L_P^2 + sum_{e,f} Γ_ef W_e W_f A_e A_f - J with L_P = sum_e P_e W_e A_e.
/// Equivalent to the edge-indicator expansion with Π_ef = P_e P_f + Γ_ef.
MomentMatrix error_moment_matrix(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph);

/// ∂M/∂W_e.
Eigen::MatrixXd moment_derivative(const WeightVector& weights, const LinkStatModel& model, const Supergraph& graph,
                                  std::size_t e);

/// trace(G ∂M/∂W_e) for every edge, where G = Y Y^T and Y holds orthonormal
/// columns. Costs O(N^2 k + M k deg) instead of M dense derivatives.
Eigen::VectorXd moment_gradient_contraction(const WeightVector& weights, const LinkStatModel& model,
                                            const Supergraph& graph, const Eigen::MatrixXd& basis);

struct MomentEstimate {
  Eigen::MatrixXd mean;
  /// Entrywise standard error of the mean (zero when n_samples = 1).
  Eigen::MatrixXd stderr_;
  std::size_t n_samples = 0;
};

/// Sample average of W(ω)^2 over topologies drawn from the link model.
MomentEstimate monte_carlo_moment_oracle(const WeightVector& weights, const LinkStatModel& model,
                                         const Supergraph& graph, std::size_t n_samples, std::uint64_t seed);

}  // namespace cwopt

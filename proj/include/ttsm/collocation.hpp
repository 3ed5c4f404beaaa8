#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

#include "ttsm/grid.hpp"
#include "ttsm/problem.hpp"
#include "ttsm/spectral.hpp"

namespace ttsm {

/// The collocated invariance equation
///
///   r(q) = sum_j omega_j D_j q - f(q, theta)
///
/// on a tensor grid, with the problem's anchor (if any) replacing the
/// anchored rows by q[anchor] - prescribed.
class ResidualSystem {
 public:
  ResidualSystem(TorusProblem problem, AngularGrid grid, bool apply_anchor = true,
                 OperatorMode op_mode = OperatorMode::MatrixFree);

  [[nodiscard]] const TorusProblem& problem() const noexcept { return problem_; }
  [[nodiscard]] const AngularGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] const std::vector<LiftedOperator>& lifted_ops() const noexcept { return ops_; }
  [[nodiscard]] bool anchor_applied() const noexcept { return !anchor_rows_.empty(); }
  [[nodiscard]] const std::vector<Eigen::Index>& anchor_rows() const noexcept { return anchor_rows_; }
  [[nodiscard]] Eigen::Index dimension() const noexcept { return dimension_; }
  [[nodiscard]] int state_dim() const noexcept { return problem_.state_dim; }

  /// sum_j omega_j D_j q, without the forcing or anchor.
  [[nodiscard]] Eigen::VectorXd apply_transport(const Eigen::VectorXd& q) const;

  [[nodiscard]] TorusField zero_field() const { return TorusField(grid_, problem_.state_dim); }

 private:
  friend Eigen::VectorXd assemble_residual(const ResidualSystem&, const TorusField&);

  TorusProblem problem_;
  AngularGrid grid_;
  std::vector<LiftedOperator> ops_;
  Eigen::Index dimension_;
  std::vector<Eigen::Index> anchor_rows_;
  Eigen::VectorXd anchor_values_;
};

/// Linear operator of the residual Jacobian. Dense mode carries the matrix;
/// both modes provide `apply`.
struct JacobianOperator {
  Eigen::Index dimension = 0;
  std::optional<Eigen::MatrixXd> matrix;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
};

Eigen::VectorXd assemble_residual(const ResidualSystem& sys, const TorusField& qhat);

/// J = sum_j omega_j D_j - blockdiag(df/dq), anchored rows replaced by unit rows.
/// A matrix-free operator refers to `sys` and must not outlive it.
JacobianOperator assemble_jacobian(const ResidualSystem& sys, const TorusField& qhat, OperatorMode mode);

/// Max-norm residual, on `coarse_grid`, of the fine field's interpolant.
/// Computed without the anchor row, so it measures the nodal truncation error.
double truncation_error_probe(const TorusProblem& problem, const AngularGrid& coarse_grid,
                              const TorusField& fine_field);

}  // namespace ttsm

#pragma once

#include <Eigen/Dense>

#include <functional>

namespace ttsm {

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct GmresConfig {
  int restart = 50;
  double rel_tol = 1e-10;
  int max_outer = 40;
};

struct GmresResult {
  Eigen::VectorXd x;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
  bool breakdown = false;  ///< Arnoldi produced a zero vector before reaching tolerance
};

/// Restarted GMRES(m) with modified Gram-Schmidt and Givens rotations, zero
/// initial guess and no preconditioner. Reaching max_outer is reported
/// through `converged`, not thrown.
GmresResult gmres_solve(const LinearMap& apply, const Eigen::VectorXd& b, const GmresConfig& config = {});

/// LU with partial pivoting. Throws SolveError when the matrix is
/// numerically singular (smallest pivot below dim * eps times the largest).
Eigen::VectorXd dense_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace ttsm

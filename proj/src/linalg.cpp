#include "ttsm/linalg.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "ttsm/error.hpp"

namespace ttsm {

GmresResult gmres_solve(const LinearMap& apply, const Eigen::VectorXd& b, const GmresConfig& config) {
  if (config.restart < 1 || config.max_outer < 1 || !(config.rel_tol > 0.0)) {
    throw InvalidArgument("invalid GMRES configuration");
  }
  const Eigen::Index dim = b.size();
  GmresResult out;
  out.x = Eigen::VectorXd::Zero(dim);
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    out.converged = true;
    return out;
  }

  const int m = static_cast<int>(std::min<Eigen::Index>(config.restart, dim));
  Eigen::MatrixXd basis(dim, m + 1);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  Eigen::VectorXd r = b;
  double r_norm = b_norm;
  while (out.outer_iterations < config.max_outer) {
    ++out.outer_iterations;
    basis.col(0) = r / r_norm;
    g.setZero();
    g[0] = r_norm;
    hess.setZero();

    int k = 0;
    for (; k < m; ++k) {
      Eigen::VectorXd w = apply(basis.col(k));
      for (int i = 0; i <= k; ++i) {
        hess(i, k) = basis.col(i).dot(w);
        w -= hess(i, k) * basis.col(i);
      }
      hess(k + 1, k) = w.norm();
      ++out.inner_iterations;

      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * hess(i, k) + sn[i] * hess(i + 1, k);
        hess(i + 1, k) = -sn[i] * hess(i, k) + cs[i] * hess(i + 1, k);
        hess(i, k) = t;
      }
      const double h_kk = hess(k, k);
      const double h_next = hess(k + 1, k);
      const double denom = std::hypot(h_kk, h_next);
      const bool lucky = h_next <= std::numeric_limits<double>::epsilon() * denom;
      cs[k] = denom == 0.0 ? 1.0 : h_kk / denom;
      sn[k] = denom == 0.0 ? 0.0 : h_next / denom;
      hess(k, k) = denom;
      hess(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];

      if (lucky) {
        out.breakdown = std::abs(g[k + 1]) > config.rel_tol * b_norm;
        ++k;
        break;
      }
      basis.col(k + 1) = w / h_next;
      if (std::abs(g[k + 1]) <= config.rel_tol * b_norm) {
        ++k;
        break;
      }
    }

    // Back substitution on the k x k upper triangle.
    Eigen::VectorXd y = hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    out.x += basis.leftCols(k) * y;

    r = b - apply(out.x);
    r_norm = r.norm();
    out.rel_residual = r_norm / b_norm;
    if (out.rel_residual <= config.rel_tol) {
      out.converged = true;
      return out;
    }
    if (out.breakdown) return out;
  }
  return out;
}

Eigen::VectorXd dense_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw InvalidArgument("dense_solve dimension mismatch");
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  const double biggest = diag.maxCoeff();
  const double threshold = static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * biggest;
  if (!(biggest > 0.0) || !(diag.minCoeff() > threshold) || !diag.allFinite()) {
    throw SolveError("singular Jacobian: the system has a neutral direction; declare a nodal anchor");
  }
  return lu.solve(b);
}

}  // namespace ttsm

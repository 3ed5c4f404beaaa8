#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ttsm/grid.hpp"

namespace ttsm {

/// Pins the state at one collocation node. An empty `components` list
/// constrains the full state vector; otherwise only the listed components.
struct Anchor {
  std::vector<int> node;  ///< per-axis node indices
  Eigen::VectorXd value;  ///< prescribed value, one entry per constrained component
  std::vector<int> components;

  [[nodiscard]] std::vector<int> constrained_components(int state_dim) const;
};

using RhsFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd& q, std::span<const double> phases)>;
using RhsJacobian = std::function<Eigen::MatrixXd(const Eigen::VectorXd& q, std::span<const double> phases)>;

/// A dynamical system lifted to the torus: q' = f(q, theta_1, ..., theta_k).
///
/// Both callables must be pure; residual assembly may evaluate nodes
/// concurrently.
struct TorusProblem {
  std::string label;
  int state_dim = 1;
  int torus_dim = 2;
  RhsFunction rhs;
  RhsJacobian rhs_jacobian;
  std::optional<Anchor> anchor;
};

/// Time-domain right-hand side f(q, t).
using TimeOde = std::function<Eigen::VectorXd(const Eigen::VectorXd& q, double t)>;

/// Evaluates the problem along the phase line theta_j = omega_j * t.
TimeOde as_time_ode(const TorusProblem& problem, std::vector<double> frequencies);

struct JacobianCheck {
  double max_relative_error = 0.0;
  int samples = 0;
};

/// Compares rhs_jacobian against central differences with step
/// 1e-6 * (1 + |q|) at random states (entries uniform in [-scale, scale])
/// and random phases. Relative error is measured per column in the max norm.
JacobianCheck check_rhs_jacobian(const TorusProblem& problem, std::mt19937_64& rng, int samples,
                                 double state_scale = 1.0);

}  // namespace ttsm

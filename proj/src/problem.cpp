#include "ttsm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ttsm/error.hpp"

namespace ttsm {

std::vector<int> Anchor::constrained_components(int state_dim) const {
  if (!components.empty()) return components;
  std::vector<int> all(static_cast<std::size_t>(state_dim));
  for (int c = 0; c < state_dim; ++c) all[static_cast<std::size_t>(c)] = c;
  return all;
}

TimeOde as_time_ode(const TorusProblem& problem, std::vector<double> frequencies) {
  if (static_cast<int>(frequencies.size()) != problem.torus_dim) {
    throw InvalidArgument("problem '" + problem.label + "' needs " + std::to_string(problem.torus_dim) +
                          " frequencies");
  }
  return [rhs = problem.rhs, w = std::move(frequencies)](const Eigen::VectorXd& q, double t) {
    std::vector<double> phases(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) phases[j] = std::fmod(w[j] * t, 2.0 * std::numbers::pi);
    return rhs(q, phases);
  };
}

JacobianCheck check_rhs_jacobian(const TorusProblem& problem, std::mt19937_64& rng, int samples,
                                 double state_scale) {
  std::uniform_real_distribution<double> state_dist(-state_scale, state_scale);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  const int n = problem.state_dim;
  JacobianCheck out;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = state_dist(rng);
    std::vector<double> phases(static_cast<std::size_t>(problem.torus_dim));
    for (auto& p : phases) p = phase_dist(rng);

    const Eigen::MatrixXd analytic = problem.rhs_jacobian(q, phases);
    for (int c = 0; c < n; ++c) {
      const double h = 1e-6 * (1.0 + std::abs(q[c]));
      Eigen::VectorXd qp = q;
      Eigen::VectorXd qm = q;
      qp[c] += h;
      qm[c] -= h;
      const Eigen::VectorXd fd = (problem.rhs(qp, phases) - problem.rhs(qm, phases)) / (2.0 * h);
      const double scale = std::max({analytic.col(c).lpNorm<Eigen::Infinity>(), fd.lpNorm<Eigen::Infinity>(), 1.0});
      out.max_relative_error =
          std::max(out.max_relative_error, (analytic.col(c) - fd).lpNorm<Eigen::Infinity>() / scale);
    }
    ++out.samples;
  }
  return out;
}

}  // namespace ttsm

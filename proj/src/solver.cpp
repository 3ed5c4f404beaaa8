#include "ttsm/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "ttsm/error.hpp"

namespace ttsm {

void NewtonConfig::validate() const {
  if (!(residual_tol > 0.0)) throw InvalidArgument("residual_tol must be positive");
  if (max_newton_iters < 1) throw InvalidArgument("max_newton_iters must be >= 1");
  if (gmres.restart < 1) throw InvalidArgument("gmres_restart must be >= 1");
  if (!(gmres.rel_tol > 0.0)) throw InvalidArgument("gmres_rel_tol must be positive");
  if (gmres.max_outer < 1) throw InvalidArgument("gmres_max_outer must be >= 1");
  if (max_halvings < 0) throw InvalidArgument("max_halvings must be >= 0");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
    throw InvalidArgument("sufficient_decrease must lie in (0, 1)");
  }
}

std::string to_string(LinearSolverKind kind) {
  switch (kind) {
    case LinearSolverKind::Auto: return "auto";
    case LinearSolverKind::Gmres: return "gmres";
    case LinearSolverKind::DenseDirect: return "dense_direct";
  }
  return "auto";
}

LinearSolverKind linear_solver_from_string(const std::string& name) {
  if (name == "auto") return LinearSolverKind::Auto;
  if (name == "gmres") return LinearSolverKind::Gmres;
  if (name == "dense_direct" || name == "dense") return LinearSolverKind::DenseDirect;
  throw InvalidArgument("unknown linear solver '" + name + "'");
}

SolveReport newton_solve(const ResidualSystem& sys, const TorusField& initial_guess, const NewtonConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  LinearSolverKind kind = config.linear_solver;
  if (kind == LinearSolverKind::Auto) {
    kind = sys.dimension() <= kAutoDenseLimit ? LinearSolverKind::DenseDirect : LinearSolverKind::Gmres;
  }

  SolveReport report{.solution = initial_guess};
  report.linear_solver = kind;
  TorusField& q = report.solution;

  Eigen::VectorXd r = assemble_residual(sys, q);
  double r_norm = r.lpNorm<Eigen::Infinity>();
  report.residual_history.push_back(r_norm);

  auto finish = [&](bool converged, std::string message) {
    report.converged = converged;
    report.final_residual_norm = r_norm;
    report.message = std::move(message);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
  };

  if (!std::isfinite(r_norm)) return finish(false, "initial residual is not finite");

  while (true) {
    if (r_norm <= config.residual_tol) return finish(true, "converged");
    if (report.newton_iterations >= config.max_newton_iters) {
      return finish(false, "reached max_newton_iters without meeting residual_tol");
    }

    Eigen::VectorXd step;
    if (kind == LinearSolverKind::DenseDirect) {
      const JacobianOperator jac = assemble_jacobian(sys, q, OperatorMode::Dense);
      step = dense_solve(*jac.matrix, -r);
    } else {
      const JacobianOperator jac = assemble_jacobian(sys, q, OperatorMode::MatrixFree);
      GmresResult lin = gmres_solve(jac.apply, -r, config.gmres);
      report.gmres_stats.push_back({lin.outer_iterations, lin.inner_iterations, lin.rel_residual});
      step = std::move(lin.x);
    }

    double lambda = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial_r;
    double trial_norm = 0.0;
    for (int halving = 0; halving <= config.max_halvings; ++halving) {
      TorusField trial(q.grid(), q.state_dim(), q.values() + lambda * step);
      trial_r = assemble_residual(sys, trial);
      trial_norm = trial_r.lpNorm<Eigen::Infinity>();
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - config.sufficient_decrease * lambda) * r_norm) {
        q = std::move(trial);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      return finish(false, "line search stalled after " + std::to_string(config.max_halvings) +
                               " halvings at residual " + std::to_string(r_norm));
    }
    ++report.newton_iterations;
    report.step_lengths.push_back(lambda);
    r = std::move(trial_r);
    r_norm = trial_norm;
    report.residual_history.push_back(r_norm);
  }
}

SolveReport homotopy_solve(const ProblemBuilder& build, const HomotopySchedule& schedule,
                           const TorusField& initial_guess, const NewtonConfig& config) {
  if (schedule.stages.empty()) throw InvalidArgument("homotopy schedule is empty");
  TorusField guess = initial_guess;
  std::optional<SolveReport> last;
  double total_time = 0.0;
  for (std::size_t s = 0; s < schedule.stages.size(); ++s) {
    const ResidualSystem sys(build(schedule.stages[s]), guess.grid());
    SolveReport report = newton_solve(sys, guess, config);
    total_time += report.wall_time;
    if (!report.converged) {
      report.failed_stage = s;
      report.message = "homotopy stage " + std::to_string(s) + " did not converge: " + report.message;
      report.wall_time = total_time;
      return report;
    }
    guess = report.solution;
    last = std::move(report);
  }
  last->wall_time = total_time;
  return *last;
}

SolveReport homotopy_solve(const ProblemBuilder& build, const HomotopySchedule& schedule, const AngularGrid& grid,
                           const NewtonConfig& config) {
  if (schedule.stages.empty()) throw InvalidArgument("homotopy schedule is empty");
  const TorusProblem first = build(schedule.stages.front());
  return homotopy_solve(build, schedule, TorusField(grid, first.state_dim), config);
}

}  // namespace ttsm

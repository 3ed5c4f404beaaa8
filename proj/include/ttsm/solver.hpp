#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttsm/collocation.hpp"
#include "ttsm/grid.hpp"
#include "ttsm/linalg.hpp"
#include "ttsm/problem.hpp"

namespace ttsm {

enum class LinearSolverKind {
  Auto,  ///< dense direct up to kAutoDenseLimit unknowns, GMRES above
  Gmres,
  DenseDirect,
};

inline constexpr Eigen::Index kAutoDenseLimit = 2000;

struct NewtonConfig {
  double residual_tol = 1e-10;  ///< absolute, max norm
  int max_newton_iters = 50;
  LinearSolverKind linear_solver = LinearSolverKind::Auto;
  GmresConfig gmres{};
  int max_halvings = 25;
  double sufficient_decrease = 1e-4;

  void validate() const;
};

struct GmresStepStats {
  int outer_iterations = 0;
  int inner_iterations = 0;
  double rel_residual = 0.0;
};

struct SolveReport {
  TorusField solution;
  bool converged = false;
  double final_residual_norm = 0.0;
  int newton_iterations = 0;
  std::vector<double> residual_history;  ///< one entry per iterate, starting with the initial guess
  std::vector<double> step_lengths;
  std::vector<GmresStepStats> gmres_stats;
  LinearSolverKind linear_solver = LinearSolverKind::Auto;
  double wall_time = 0.0;
  std::string message;
  std::optional<std::size_t> failed_stage;  ///< set by homotopy_solve on abort
};

/// Damped Newton on r(q) = 0 with backtracking: a step of length lambda is
/// accepted when |r(q + lambda dq)|_inf <= (1 - c lambda) |r(q)|_inf,
/// halving lambda up to max_halvings times.
///
/// Throws SolveError if the dense Jacobian is singular (missing anchor).
SolveReport newton_solve(const ResidualSystem& sys, const TorusField& initial_guess, const NewtonConfig& config);

using ParameterMap = std::map<std::string, double>;
using ProblemBuilder = std::function<TorusProblem(const ParameterMap&)>;

/// Parameter sets from a weak operating point to the target; the last stage
/// is the target.
struct HomotopySchedule {
  std::vector<ParameterMap> stages;
};

/// Chains newton_solve over the schedule, warm-starting each stage from the
/// previous solution (the first from zero). Stops at the first stage that
/// fails and records it in `failed_stage`.
SolveReport homotopy_solve(const ProblemBuilder& build, const HomotopySchedule& schedule, const AngularGrid& grid,
                           const NewtonConfig& config);

/// Same as above, starting the first stage from `initial_guess`.
SolveReport homotopy_solve(const ProblemBuilder& build, const HomotopySchedule& schedule,
                           const TorusField& initial_guess, const NewtonConfig& config);

std::string to_string(LinearSolverKind kind);
LinearSolverKind linear_solver_from_string(const std::string& name);

}  // namespace ttsm

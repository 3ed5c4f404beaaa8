#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttsm/problems.hpp"
#include "ttsm/reference.hpp"
#include "ttsm/solver.hpp"

namespace ttsm {

/// Errors below this are treated as the solver floor: rate fits skip them.
inline constexpr double kErrorFloor = 1e-10;

struct ConvergenceRow {
  int grid_size = 0;
  double error = 0.0;
  double residual = 0.0;
  int newton_iterations = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  ///< ascending grid size
  int reference_size = 0;
  double reference_residual = 0.0;
  bool exact = false;            ///< every error below 1e-11; no rate fitted
  double fitted_rate = 0.0;      ///< per grid point, from the two finest grids above the floor
  std::vector<int> fit_window;
  double wide_fitted_rate = 0.0; ///< least-squares slope over the three finest grids above the floor

  [[nodiscard]] std::vector<int> grid_sizes() const;
  [[nodiscard]] std::vector<double> errors() const;
};

/// Per-grid-point exponential rate between two (size, error) points.
double exponential_rate(int n_coarse, double e_coarse, int n_fine, double e_fine);
/// Least-squares slope of -ln(error) against grid size.
double least_squares_rate(const std::vector<int>& sizes, const std::vector<double>& errors);

/// Solves the problem on n x ... x n grids for every size and on the reference
/// size, each from the family's standard schedule, and tabulates the
/// field_error_norm against the reference. Throws SolveError naming the grid
/// size if any solve fails. Up to `jobs` solves run concurrently.
ConvergenceTable convergence_sweep(const ProblemFamily& family, const ParameterMap& params,
                                   const std::vector<int>& grids, int reference_grid, const NewtonConfig& config,
                                   int jobs = 1);

/// Solves with the family's standard schedule on an n x ... x n grid.
SolveReport standard_solve(const ProblemFamily& family, const ParameterMap& params, const std::vector<int>& counts,
                           const NewtonConfig& config);

/// Supplemental-frequency harmonic balance plan: omega0 = n1 * base and
/// omegaf ~ n2 * base, with n2/n1 a continued-fraction convergent of
/// omegaf/omega0.
struct SfhbPlan {
  double omega0 = 0.0;
  double omegaf = 0.0;
  double omega_base = 0.0;
  int n1 = 0;
  int n2 = 0;
  int n_h = 0;
  int dofs = 0;
  double pseudo_period = 0.0;
  double approximation_error = 0.0;  ///< |omegaf - n2 * base|
};

SfhbPlan sfhb_plan(double omega0, double omegaf, int max_denominator = 100);

struct SfhbSurrogateResult {
  TimeSeries series;             ///< TSM reconstruction over one pseudo-period
  double surrogate_error = 0.0;  ///< vs the analytic solution with tones at n1*base, n2*base
  double true_deviation = 0.0;   ///< vs the incommensurate analytic solution
  double deviation_bound = 0.0;  ///< a priori bound from the frequency mismatch
  int dofs = 0;
  SolveReport report;
};

/// Solves the linear oscillator as a single-frequency time-spectral system at
/// the plan's base frequency. Throws InvalidArgument for even n_points or
/// n_points < dofs.
SfhbSurrogateResult sfhb_surrogate_solve(const SfhbPlan& plan, int n_points, std::size_t samples = 20001);

struct ComponentComparison {
  int component = 0;
  double pre_deviation = 0.0;
  double post_deviation = 0.0;
  std::vector<Peak> torus_peaks;
  std::vector<Peak> rk4_peaks;
  std::vector<double> matched;  ///< torus peak frequencies with an RK4 peak within one bin
};

struct AttractorComparison {
  double pre_deviation = 0.0;   ///< max over compared components, t <= cut
  double post_deviation = 0.0;  ///< max over compared components, t > cut
  double resolution = 0.0;
  std::vector<ComponentComparison> components;
  TimeSeries rk4;
  TimeSeries torus;
};

/// Integrates from the family's initial state with RK4 and compares against
/// the torus reconstruction at the same times. Deviations and spectra use the
/// listed components (all if empty).
AttractorComparison attractor_comparison(const ProblemFamily& family, const ParameterMap& params,
                                         const TorusField& field, double t_end, double transient_cut,
                                         int num_steps, std::vector<int> components = {},
                                         double peak_threshold = 0.01);

}  // namespace ttsm

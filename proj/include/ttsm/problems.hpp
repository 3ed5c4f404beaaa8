#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ttsm/problem.hpp"
#include "ttsm/solver.hpp"

namespace ttsm {

// q' = sin(omega0 t) + cos(omegaf t), q(0) = 0. Neutral in q, so the torus
// problem is anchored at node (0, 0) with q = 0.
struct LinearOscillatorParams {
  double omega0 = 1.0;
  double omegaf = std::numbers::sqrt2;
};

TorusProblem linear_oscillator_problem(const LinearOscillatorParams& p);
double linear_oscillator_analytic(double t, const LinearOscillatorParams& p);
/// Torus form of the analytic solution: 1/w0 - cos(th1)/w0 + sin(th2)/wf.
double linear_oscillator_torus(std::span<const double> phases, const LinearOscillatorParams& p);

// q'' + delta q' + beta q + alpha q^3 = f1 cos(omega1 t) + f2 cos(omega2 t)
struct DuffingParams {
  double delta = 0.1;
  double beta = 1.0;
  double alpha = 3.0;
  double f1 = 0.05;
  double f2 = 0.04;
  double omega1 = 1.0;
  double omega2 = std::numbers::sqrt2;
};

/// State (q, q'). Dissipative, no anchor.
TorusProblem duffing_problem(const DuffingParams& p);

/// The weak operating point used as the first homotopy stage.
DuffingParams duffing_weak_point(DuffingParams target);

// q_tt - q_xx + q + eps q^3 + gamma q_t = g sin(x) (cos(omega1 t) + cos(omega2 t))
// on [0, length] with homogeneous Dirichlet ends, nx interior nodes.
struct KleinGordonParams {
  double gamma = 0.2;
  double epsilon = 0.5;
  double g = 1.0;
  double omega1 = 1.0;
  double omega2 = std::numbers::sqrt2;
  int nx = 8;
  double length = std::numbers::pi;
  int fd_order = 2;  ///< 2 or 4

  [[nodiscard]] double spacing() const { return length / (nx + 1); }
  [[nodiscard]] double node_x(int i) const { return (i + 1) * spacing(); }  ///< zero-based interior node
};

/// Second-derivative matrix on the interior nodes (Dirichlet ends folded in).
Eigen::MatrixXd kg_second_difference(const KleinGordonParams& p);

/// State (q_1..q_nx, v_1..v_nx).
TorusProblem klein_gordon_problem(const KleinGordonParams& p);

/// Zero-based interior node nearest to each probe position.
std::vector<int> kg_probe_nodes(const KleinGordonParams& p, std::span<const double> positions);

inline constexpr std::array<double, 3> kKleinGordonProbes{1.05, 1.75, 2.44};

/// q' = sin(th1) + cos(th2) + sin(th3) on the 3-torus, anchored q(0,0,0) = 0.
TorusProblem three_tone_linear_problem(std::array<double, 3> omega);
double three_tone_torus(std::span<const double> phases, std::array<double, 3> omega);

/// Defaults for the time-domain studies of a problem.
struct StudyDefaults {
  int grid = 3;              ///< per-axis collocation count
  double t_end = 50.0;       ///< time-domain record length
  double transient_cut = 0.0;
  int rk4_steps = 10000;
};

/// A named problem with its default parameters, frequencies, and the
/// standard initialization schedule used by the CLI and the studies.
struct ProblemFamily {
  std::string name;
  ParameterMap defaults;
  std::vector<std::string> frequency_keys;  ///< parameters holding omega_1..omega_k, in axis order
  StudyDefaults study;
  ProblemBuilder build;  ///< missing keys fall back to defaults; unknown keys are rejected
  // The remaining callables expect a resolved (complete) map.
  std::function<std::vector<double>(const ParameterMap&)> frequencies;
  std::function<HomotopySchedule(const ParameterMap&)> standard_schedule;
  std::function<Eigen::VectorXd(const ParameterMap&)> initial_state;  ///< time-domain q(0)
  /// State components of interest for spectra and comparisons.
  std::function<std::vector<int>(const ParameterMap&)> output_components;

  /// defaults overlaid with `overrides`, validated.
  [[nodiscard]] ParameterMap resolve(const ParameterMap& overrides) const;
};

/// Known names: "linear", "duffing", "kg", "three_tone".
ProblemFamily problem_family(const std::string& name);
std::vector<std::string> problem_names();

LinearOscillatorParams linear_params_from(const ParameterMap& m);
DuffingParams duffing_params_from(const ParameterMap& m);
KleinGordonParams kg_params_from(const ParameterMap& m);

}  // namespace ttsm

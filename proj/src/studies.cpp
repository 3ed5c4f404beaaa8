#include "ttsm/studies.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <string>

#include "ttsm/error.hpp"

namespace ttsm {

std::vector<int> ConvergenceTable::grid_sizes() const {
  std::vector<int> out;
  for (const auto& r : rows) out.push_back(r.grid_size);
  return out;
}

std::vector<double> ConvergenceTable::errors() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.error);
  return out;
}

double exponential_rate(int n_coarse, double e_coarse, int n_fine, double e_fine) {
  if (n_fine == n_coarse) throw InvalidArgument("rate needs two distinct grid sizes");
  return (std::log(e_coarse) - std::log(e_fine)) / static_cast<double>(n_fine - n_coarse);
}

double least_squares_rate(const std::vector<int>& sizes, const std::vector<double>& errors) {
  if (sizes.size() != errors.size() || sizes.size() < 2) throw InvalidArgument("rate fit needs >= 2 points");
  const auto m = static_cast<double>(sizes.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    sx += sizes[i];
    sy += std::log(errors[i]);
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double dx = sizes[i] - sx / m;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - sy / m);
  }
  return -sxy / sxx;
}

SolveReport standard_solve(const ProblemFamily& family, const ParameterMap& params, const std::vector<int>& counts,
                           const NewtonConfig& config) {
  const ParameterMap resolved = family.resolve(params);
  const AngularGrid grid = make_grid(family.frequencies(resolved), counts);
  return homotopy_solve(family.build, family.standard_schedule(resolved), grid, config);
}

namespace {

std::vector<int> square_counts(int n, std::size_t dims) { return std::vector<int>(dims, n); }

template <typename Fn>
auto run_bounded(std::size_t count, int jobs, Fn fn) {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<std::optional<Result>> results(count);
  const std::size_t width = static_cast<std::size_t>(std::max(jobs, 1));
  for (std::size_t start = 0; start < count; start += width) {
    std::vector<std::future<Result>> batch;
    for (std::size_t i = start; i < std::min(count, start + width); ++i) {
      batch.push_back(std::async(width == 1 ? std::launch::deferred : std::launch::async, fn, i));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) results[start + k] = batch[k].get();
  }
  return results;
}

}  // namespace

ConvergenceTable convergence_sweep(const ProblemFamily& family, const ParameterMap& params,
                                   const std::vector<int>& grids, int reference_grid, const NewtonConfig& config,
                                   int jobs) {
  if (grids.empty()) throw InvalidArgument("convergence sweep needs at least one grid");
  std::vector<int> sizes = grids;
  std::sort(sizes.begin(), sizes.end());
  if (reference_grid <= sizes.back()) throw InvalidArgument("reference grid must exceed every sweep grid");

  const ParameterMap resolved = family.resolve(params);
  const std::size_t dims = family.frequencies(resolved).size();

  std::vector<int> all = sizes;
  all.push_back(reference_grid);
  auto reports = run_bounded(all.size(), jobs, [&](std::size_t i) {
    return standard_solve(family, resolved, square_counts(all[i], dims), config);
  });
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!reports[i]->converged) {
      throw SolveError("convergence sweep: solve on grid " + std::to_string(all[i]) + " did not converge (" +
                       reports[i]->message + ")");
    }
  }

  const SolveReport& ref = *reports.back();
  ConvergenceTable table;
  table.reference_size = reference_grid;
  table.reference_residual = ref.final_residual_norm;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const SolveReport& r = *reports[i];
    table.rows.push_back({sizes[i], field_error_norm(r.solution, ref.solution), r.final_residual_norm,
                          r.newton_iterations});
  }

  table.exact = std::all_of(table.rows.begin(), table.rows.end(), [](const auto& r) { return r.error < 1e-11; });
  if (table.exact) return table;

  std::vector<int> fit_sizes;
  std::vector<double> fit_errors;
  for (const auto& r : table.rows) {
    if (r.error > kErrorFloor) {
      fit_sizes.push_back(r.grid_size);
      fit_errors.push_back(r.error);
    }
  }
  if (fit_sizes.size() >= 2) {
    const std::size_t last = fit_sizes.size() - 1;
    table.fit_window = {fit_sizes[last - 1], fit_sizes[last]};
    table.fitted_rate = exponential_rate(fit_sizes[last - 1], fit_errors[last - 1], fit_sizes[last], fit_errors[last]);
    const std::size_t wide = std::min<std::size_t>(3, fit_sizes.size());
    table.wide_fitted_rate = least_squares_rate({fit_sizes.end() - static_cast<long>(wide), fit_sizes.end()},
                                                {fit_errors.end() - static_cast<long>(wide), fit_errors.end()});
  }
  return table;
}

SfhbPlan sfhb_plan(double omega0, double omegaf, int max_denominator) {
  if (!(omega0 > 0.0 && omegaf > 0.0)) throw InvalidArgument("SF-HB frequencies must be positive");
  if (max_denominator < 1) throw InvalidArgument("max_denominator must be >= 1");
  const double ratio = omegaf / omega0;

  // Continued-fraction convergents p/q of the ratio; keep the last one with q <= cap.
  long long p_prev = 1, q_prev = 0;
  long long p = static_cast<long long>(std::floor(ratio)), q = 1;
  double x = ratio - std::floor(ratio);
  for (int iter = 0; iter < 64 && x > 1e-12; ++iter) {
    const double inv = 1.0 / x;
    const auto a = static_cast<long long>(std::floor(inv));
    const long long p_next = a * p + p_prev;
    const long long q_next = a * q + q_prev;
    if (q_next > max_denominator) break;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    x = inv - static_cast<double>(a);
  }
  if (p == 0) p = 1;  // ratio below 1/cap still needs a positive harmonic

  SfhbPlan plan;
  plan.omega0 = omega0;
  plan.omegaf = omegaf;
  plan.n1 = static_cast<int>(q);
  plan.n2 = static_cast<int>(p);
  plan.omega_base = omega0 / plan.n1;
  plan.n_h = std::max(plan.n1, plan.n2);
  plan.dofs = 2 * plan.n_h + 1;
  plan.pseudo_period = 2.0 * std::numbers::pi / plan.omega_base;
  plan.approximation_error = std::abs(omegaf - plan.n2 * plan.omega_base);
  return plan;
}

SfhbSurrogateResult sfhb_surrogate_solve(const SfhbPlan& plan, int n_points, std::size_t samples) {
  if (n_points % 2 == 0) throw InvalidArgument("even grid unsupported");
  if (n_points < plan.dofs) throw InvalidArgument("n_points must be at least the SF-HB DOF count");

  const int n1 = plan.n1;
  const int n2 = plan.n2;
  TorusProblem problem;
  problem.label = "sfhb_surrogate";
  problem.state_dim = 1;
  problem.torus_dim = 1;
  problem.rhs = [n1, n2](const Eigen::VectorXd&, std::span<const double> th) {
    return Eigen::VectorXd::Constant(1, std::sin(n1 * th[0]) + std::cos(n2 * th[0]));
  };
  problem.rhs_jacobian = [](const Eigen::VectorXd&, std::span<const double>) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  problem.anchor = Anchor{{0}, Eigen::VectorXd::Zero(1), {0}};

  const AngularGrid grid = make_grid({plan.omega_base}, {n_points});
  const ResidualSystem sys(problem, grid);
  NewtonConfig config;
  SolveReport report = newton_solve(sys, sys.zero_field(), config);

  const double w1 = n1 * plan.omega_base;
  const double w2 = n2 * plan.omega_base;
  auto surrogate = [&](double t) { return 1.0 / w1 - std::cos(w1 * t) / w1 + std::sin(w2 * t) / w2; };
  const LinearOscillatorParams truth{plan.omega0, plan.omegaf};

  SfhbSurrogateResult out{.series = torus_to_time(report.solution, uniform_times(0.0, plan.pseudo_period, samples)),
                          .report = report};
  out.dofs = plan.dofs;
  for (std::size_t i = 0; i < out.series.size(); ++i) {
    const double t = out.series.times[i];
    const double q = out.series.states[i][0];
    out.surrogate_error = std::max(out.surrogate_error, std::abs(q - surrogate(t)));
    out.true_deviation = std::max(out.true_deviation, std::abs(q - linear_oscillator_analytic(t, truth)));
  }
  // |sin(a t)/a - sin(b t)/b| <= t |a - b| / a + |1/a - 1/b|; the constant
  // and cosine terms coincide because n1 * base = omega0 exactly.
  out.deviation_bound = plan.pseudo_period * plan.approximation_error / plan.omegaf +
                        std::abs(1.0 / plan.omegaf - 1.0 / w2) + out.surrogate_error;
  return out;
}

AttractorComparison attractor_comparison(const ProblemFamily& family, const ParameterMap& params,
                                         const TorusField& field, double t_end, double transient_cut, int num_steps,
                                         std::vector<int> components, double peak_threshold) {
  if (!(transient_cut >= 0.0 && transient_cut < t_end)) throw InvalidArgument("transient cut must lie in [0, t_end)");
  const ParameterMap resolved = family.resolve(params);
  const TorusProblem problem = family.build(resolved);
  if (!field.grid().same_frequencies(make_grid(family.frequencies(resolved), field.grid().counts()), 1e-12)) {
    throw InvalidArgument("field frequencies do not match the problem");
  }
  if (components.empty()) {
    for (int c = 0; c < problem.state_dim; ++c) components.push_back(c);
  }

  AttractorComparison out;
  out.rk4 = rk4_integrate(as_time_ode(problem, family.frequencies(resolved)), family.initial_state(resolved), 0.0,
                          t_end, num_steps);
  out.torus = torus_to_time(field, out.rk4.times);

  for (int c : components) {
    ComponentComparison cmp;
    cmp.component = c;
    for (std::size_t i = 0; i < out.rk4.size(); ++i) {
      const double d = std::abs(out.rk4.states[i][c] - out.torus.states[i][c]);
      if (out.rk4.times[i] > transient_cut) {
        cmp.post_deviation = std::max(cmp.post_deviation, d);
      } else {
        cmp.pre_deviation = std::max(cmp.pre_deviation, d);
      }
    }
    const Spectrum ts = compute_spectrum(out.torus, c, transient_cut, t_end);
    const Spectrum rs = compute_spectrum(out.rk4, c, transient_cut, t_end);
    out.resolution = ts.resolution;
    cmp.torus_peaks = find_peaks(ts, peak_threshold);
    cmp.rk4_peaks = find_peaks(rs, peak_threshold);
    for (const Peak& p : cmp.torus_peaks) {
      if (has_peak_near(cmp.rk4_peaks, p.frequency, ts.resolution)) cmp.matched.push_back(p.frequency);
    }
    out.pre_deviation = std::max(out.pre_deviation, cmp.pre_deviation);
    out.post_deviation = std::max(out.post_deviation, cmp.post_deviation);
    out.components.push_back(std::move(cmp));
  }
  return out;
}

}  // namespace ttsm

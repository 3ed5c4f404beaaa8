// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ttsm/collocation.hpp"
#include "ttsm/problems.hpp"
#include "ttsm/reference.hpp"
#include "ttsm/solver.hpp"
#include "ttsm/spectral.hpp"
#include "ttsm/studies.hpp"

using namespace ttsm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// Newton histories of every converged run, checked under criterion 7.
std::vector<std::vector<double>> g_histories;

void record(const SolveReport& r) {
  if (r.converged) g_histories.push_back(r.residual_history);
}

int g_failures = 0;

void report(const char* id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  o.detail.precision(4);
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++g_failures;
  std::printf("[%s] %s %s:%s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

const double kSqrt2 = std::numbers::sqrt2;
const double kBeat = 0.97 + 0.03 * std::numbers::sqrt2;

// Max error of the 3x3 linear-oscillator solve at the nodes and at 1000 random times.
double linear_case_error(double w0, double wf, std::mt19937_64& rng) {
  const LinearOscillatorParams lp{w0, wf};
  const AngularGrid g = make_grid({w0, wf}, {3, 3});
  const ResidualSystem sys(linear_oscillator_problem(lp), g);
  const SolveReport r = newton_solve(sys, sys.zero_field(), {});
  record(r);
  if (!r.converged) return INFINITY;
  double err = 0.0;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    err = std::max(err, std::abs(r.solution.node(i)[0] - linear_oscillator_torus(g.node_phases(i), lp)));
  }
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<double> times(1000);
  for (double& t : times) t = u(rng);
  const TimeSeries s = torus_to_time(r.solution, times);
  for (std::size_t i = 0; i < s.size(); ++i) {
    err = std::max(err, std::abs(s.states[i][0] - linear_oscillator_analytic(s.times[i], lp)));
  }
  return err;
}

SolveReport solve_family(const std::string& name, int n) {
  const ProblemFamily fam = problem_family(name);
  const ParameterMap m = fam.resolve({});
  SolveReport r = standard_solve(fam, m, std::vector<int>(fam.frequencies(m).size(), n), {});
  record(r);
  return r;
}

bool monotone_with_one_exception(const std::vector<double>& e) {
  int violations = 0;
  for (std::size_t i = 1; i < e.size(); ++i) violations += e[i] >= e[i - 1] ? 1 : 0;
  return violations <= 1;
}

void print_table(Outcome& o, const ConvergenceTable& t) {
  o.detail << " errors";
  for (const auto& r : t.rows) o.detail << " " << r.grid_size << ":" << r.error;
}

double duffing_3x3_error = 0.0;
double beat_case_error = INFINITY;

// Independent residual: direct loops over nodes with closed-form entries.
Eigen::VectorXd nodal_loop_residual(const TorusProblem& p, const AngularGrid& g, const TorusField& q) {
  const int n = p.state_dim;
  Eigen::VectorXd r(q.size());
  for (std::size_t node = 0; node < g.num_nodes(); ++node) {
    const auto idx = g.multi_index(node);
    Eigen::VectorXd dq = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < g.dims(); ++j) {
      const int m = g.count(j);
      for (int l = 0; l < m; ++l) {
        const int d = idx[j] - l;
        if (d == 0) continue;
        auto other = idx;
        other[j] = l;
        dq += g.frequency(j) * 0.5 * (d % 2 == 0 ? 1.0 : -1.0) / std::sin(d * std::numbers::pi / m) *
              q.node(g.linear_index(other));
      }
    }
    r.segment(static_cast<Eigen::Index>(node) * n, n) = dq - p.rhs(q.node(node), g.node_phases(node));
  }
  return r;
}

TorusField random_field(const AngularGrid& g, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TorusField f(g, n);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.values()[i] = u(rng);
  return f;
}

void criterion1(Outcome& o) {
  std::mt19937_64 rng(2024);
  const auto t0 = Clock::now();
  const std::vector<std::pair<double, double>> pairs{{1.0, kSqrt2}, {1.0, 2.0 * std::numbers::pi / 100.0}, {1.0, kBeat}};
  double worst = 0.0;
  for (const auto& [w0, wf] : pairs) {
    const double e = linear_case_error(w0, wf, rng);
    o.detail << " (" << w0 << "," << wf << ") err " << e << ";";
    worst = std::max(worst, e);
    if (wf == kBeat) beat_case_error = e;
  }
  const double elapsed = seconds_since(t0);
  o.require(worst < 1e-11, "max error < 1e-11");
  o.require(elapsed < 1.0, "runtime < 1 s");
}

void criterion2(Outcome& o) {
  const auto t0 = Clock::now();
  const SolveReport coarse = solve_family("duffing", 3);
  const SolveReport ref = solve_family("duffing", 31);
  o.require(coarse.converged && ref.converged, "solves converge");
  o.require(coarse.final_residual_norm <= 1e-10, "3x3 residual <= 1e-10");
  duffing_3x3_error = field_error_norm(coarse.solution, ref.solution);
  const double elapsed = seconds_since(t0);
  o.detail << " 3x3 vs 31x31 error " << duffing_3x3_error << ", band [0.008, 0.032]";
  o.require(duffing_3x3_error >= 0.8e-2 && duffing_3x3_error <= 3.2e-2, "error in band");
  o.require(elapsed < 30.0, "runtime < 30 s");
}

void rate_criterion(Outcome& o, const std::string& name, double lo, double hi, double budget) {
  const auto t0 = Clock::now();
  const ProblemFamily fam = problem_family(name);
  const ConvergenceTable t = convergence_sweep(fam, {}, {3, 5, 7, 9, 11, 13, 15, 17, 19}, 31, {});
  const double elapsed = seconds_since(t0);
  print_table(o, t);
  o.detail << "; two-finest rate " << t.fitted_rate << " (wide " << t.wide_fitted_rate << "), band [" << lo << ", "
           << hi << "]";
  o.require(!t.exact && t.fitted_rate >= lo && t.fitted_rate <= hi, "rate in band");
  o.require(monotone_with_one_exception(t.errors()), "errors monotone decreasing");
  o.require(elapsed < budget, "runtime budget");
}

void criterion4_extra(Outcome& o) {
  const SolveReport r = solve_family("kg", 5);
  o.detail << "; 5x5 residual " << r.final_residual_norm << " in " << r.newton_iterations << " iterations";
  o.require(r.converged && r.final_residual_norm <= 1e-10, "5x5 converges to 1e-10");
}

void criterion5(Outcome& o) {
  const SfhbPlan p = sfhb_plan(1.0, kBeat);
  o.detail << " n1 " << p.n1 << ", n2 " << p.n2 << ", base " << p.omega_base << ", dofs " << p.dofs << ", T "
           << p.pseudo_period << ", beat-case 3x3 error " << beat_case_error;
  o.require(p.n1 == 80 && p.n2 == 81 && p.dofs == 163, "integer plan");
  o.require(std::abs(p.omega_base - 0.0125) <= 1e-10, "base frequency");
  o.require(p.pseudo_period >= 502.0 && p.pseudo_period <= 504.0, "pseudo-period");
  o.require(beat_case_error < 1e-11, "beat case exact on 3x3");
}

bool is_combination(double f, const std::vector<double>& w, double res) {
  for (int k1 = -4; k1 <= 4; ++k1) {
    for (int k2 = -4; k2 <= 4; ++k2) {
      if ((k1 == 0 && k2 == 0) || (std::abs(k1) + std::abs(k2) == 1)) continue;
      if (std::abs(std::abs(k1 * w[0] + k2 * w[1]) - f) <= res) return true;
    }
  }
  return false;
}

void criterion6(Outcome& o) {
  const ProblemFamily fam = problem_family("duffing");
  const ParameterMap m = fam.resolve({});
  const auto w = fam.frequencies(m);

  const SolveReport r3 = solve_family("duffing", 3);
  const AttractorComparison c3 = attractor_comparison(fam, m, r3.solution, 220.0, 55.0, 15000, {0});
  const auto& cc = c3.components[0];
  const double res = c3.resolution;
  const bool forcing_torus = has_peak_near(cc.torus_peaks, w[0], res) && has_peak_near(cc.torus_peaks, w[1], res);
  const bool forcing_rk4 = has_peak_near(cc.rk4_peaks, w[0], res) && has_peak_near(cc.rk4_peaks, w[1], res);
  double tone = 0.0;
  for (const Peak& p : cc.torus_peaks) {
    if (is_combination(p.frequency, w, res)) tone = p.frequency;
  }
  o.detail << " 3x3 torus peaks";
  for (const Peak& p : cc.torus_peaks) o.detail << " " << p.frequency;
  o.detail << "; RK4 peaks";
  for (const Peak& p : cc.rk4_peaks) o.detail << " " << p.frequency;
  o.detail << "; bin " << res;
  o.require(forcing_torus, "torus peaks at omega1 and omega2");
  o.require(tone > 0.0, "combination tone above 1%");
  o.require(forcing_rk4, "RK4 peaks at omega1 and omega2");

  // Tones with |k_j| > 1 lie outside the 3x3 lattice; check full peak
  // agreement where the grid resolves them.
  const SolveReport r7 = solve_family("duffing", 7);
  const AttractorComparison c7 = attractor_comparison(fam, m, r7.solution, 220.0, 55.0, 15000, {0});
  const auto& c = c7.components[0];
  bool all_match = c.matched.size() == c.torus_peaks.size();
  for (const Peak& p : c.rk4_peaks) all_match = all_match && has_peak_near(c.torus_peaks, p.frequency, res);
  o.detail << "; 7x7 peaks matched " << c.matched.size() << "/" << c.torus_peaks.size() << " torus, RK4 count "
           << c.rk4_peaks.size();
  o.require(all_match, "7x7 torus and RK4 peak sets coincide");
}

void criterion7(Outcome& o) {
  std::mt19937_64 rng(7);

  // Differentiation matrices.
  double exact_err = 0.0, anti = 0.0, rows = 0.0;
  for (int n = 1; n <= 63; n += 2) {
    const Eigen::MatrixXd d = spectral_diff_matrix(n).entries();
    for (int k = 0; k <= (n - 1) / 2; ++k) {
      Eigen::VectorXd s(n), ds(n);
      for (int j = 0; j < n; ++j) {
        const double th = 2.0 * std::numbers::pi * j / n;
        s[j] = std::sin(k * th) + std::cos(k * th);
        ds[j] = k * (std::cos(k * th) - std::sin(k * th));
      }
      exact_err = std::max(exact_err, (d * s - ds).lpNorm<Eigen::Infinity>() / std::max(1, k));
    }
    anti = std::max(anti, (d + d.transpose()).lpNorm<Eigen::Infinity>());
    rows = std::max(rows, d.rowwise().sum().lpNorm<Eigen::Infinity>());
  }
  o.detail << " D exactness " << exact_err << ", antisymmetry " << anti << ", row sums " << rows << ";";
  o.require(exact_err < 1e-11 && anti < 1e-13 && rows < 1e-11, "differentiation matrix properties");

  // Kronecker residual against the nodal loop.
  double kron = 0.0;
  {
    KleinGordonParams kg;
    kg.nx = 3;
    const std::vector<std::pair<TorusProblem, AngularGrid>> cases{
        {duffing_problem({}), make_grid({1.0, kSqrt2}, {5, 7})},
        {klein_gordon_problem(kg), make_grid({1.0, kSqrt2}, {3, 5})},
        {three_tone_linear_problem({1.0, kSqrt2, std::sqrt(3.0)}), make_grid({1.0, kSqrt2, std::sqrt(3.0)}, {3, 5, 3})},
    };
    TorusProblem one = duffing_problem({});
    one.torus_dim = 1;
    one.rhs = [f = duffing_problem({}).rhs](const Eigen::VectorXd& q, std::span<const double> th) {
      const double ph[2] = {th[0], 0.5 * th[0]};
      return f(q, ph);
    };
    std::vector<std::pair<TorusProblem, AngularGrid>> all = cases;
    all.emplace_back(one, make_grid({1.0}, {9}));
    for (const auto& [p, g] : all) {
      const TorusField q = random_field(g, p.state_dim, rng);
      const ResidualSystem sys(p, g, false);
      kron = std::max(kron, (assemble_residual(sys, q) - nodal_loop_residual(p, g, q)).lpNorm<Eigen::Infinity>());
    }
  }
  o.detail << " Kronecker vs nodal loop " << kron << ";";
  o.require(kron < 1e-13, "Kronecker residual matches nodal loop");

  // Residual Jacobian against central differences on every problem.
  double jac = 0.0;
  for (const auto& name : problem_names()) {
    const ProblemFamily fam = problem_family(name);
    const ParameterMap m = fam.resolve({});
    const auto w = fam.frequencies(m);
    const AngularGrid g = make_grid(w, std::vector<int>(w.size(), 3));
    const ResidualSystem sys(fam.build(m), g);
    const TorusField q = random_field(g, sys.state_dim(), rng);
    const Eigen::MatrixXd j = *assemble_jacobian(sys, q, OperatorMode::Dense).matrix;
    for (Eigen::Index col = 0; col < sys.dimension(); ++col) {
      const double h = 1e-6 * (1.0 + std::abs(q.values()[col]));
      TorusField qp = q, qm = q;
      qp.values()[col] += h;
      qm.values()[col] -= h;
      const Eigen::VectorXd fd = (assemble_residual(sys, qp) - assemble_residual(sys, qm)) / (2 * h);
      jac = std::max(jac, (fd - j.col(col)).lpNorm<Eigen::Infinity>() / std::max(1.0, j.col(col).lpNorm<Eigen::Infinity>()));
    }
  }
  o.detail << " Jacobian vs FD " << jac << ";";
  o.require(jac < 1e-5, "Jacobian matches finite differences");

  // Truncation-error probe for Duffing until the floor.
  {
    const ProblemFamily fam = problem_family("duffing");
    const ParameterMap m = fam.resolve({});
    const SolveReport ref = solve_family("duffing", 31);
    const TorusProblem p = fam.build(m);
    std::vector<int> sizes;
    std::vector<double> probes;
    for (int n = 3; n <= 29; n += 2) {
      const double v = truncation_error_probe(p, make_grid(fam.frequencies(m), {n, n}), ref.solution);
      if (v <= kErrorFloor) break;
      sizes.push_back(n);
      probes.push_back(v);
    }
    double min_pair = INFINITY;
    bool decreasing = true;
    for (std::size_t i = 1; i < probes.size(); ++i) {
      min_pair = std::min(min_pair, exponential_rate(sizes[i - 1], probes[i - 1], sizes[i], probes[i]));
      decreasing = decreasing && probes[i] < probes[i - 1];
    }
    const double slope = least_squares_rate(sizes, probes);
    o.detail << " truncation probe log-slope " << slope << " over n=" << sizes.front() << ".." << sizes.back()
             << " (smallest pairwise " << min_pair << ");";
    o.require(slope >= 0.3 && decreasing, "truncation probe decays at >= 0.3 per grid point");
  }

  // Anchoring.
  {
    const LinearOscillatorParams lp;
    const AngularGrid g = make_grid({lp.omega0, lp.omegaf}, {5, 5});
    const ResidualSystem anchored(linear_oscillator_problem(lp), g);
    const ResidualSystem free_sys(linear_oscillator_problem(lp), g, false);
    const Eigen::MatrixXd ja = *assemble_jacobian(anchored, anchored.zero_field(), OperatorMode::Dense).matrix;
    const Eigen::MatrixXd jf = *assemble_jacobian(free_sys, free_sys.zero_field(), OperatorMode::Dense).matrix;
    const double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(ja).singularValues().minCoeff();
    const double null = (jf * Eigen::VectorXd::Ones(jf.cols())).lpNorm<Eigen::Infinity>();
    o.detail << " anchored sigma_min " << smin << ", unanchored |J 1| " << null << ";";
    o.require(smin > 1e-3 && null < 1e-12, "anchor restores rank");
  }

  // Three-tone k = 3.
  {
    const std::array<double, 3> w{1.0, kSqrt2, std::sqrt(3.0)};
    const AngularGrid g = make_grid({w[0], w[1], w[2]}, {3, 3, 3});
    const ResidualSystem sys(three_tone_linear_problem(w), g);
    const SolveReport r = newton_solve(sys, sys.zero_field(), {});
    record(r);
    double err = 0.0;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      err = std::max(err, std::abs(r.solution.node(i)[0] - three_tone_torus(g.node_phases(i), w)));
    }
    o.detail << " three-tone error " << err << ";";
    o.require(r.converged && err < 1e-11, "three-tone solve exact");
  }

  // RK4 order.
  double rmin = INFINITY, rmax = 0.0;
  for (const auto& name : problem_names()) {
    const ProblemFamily fam = problem_family(name);
    const ParameterMap m = fam.resolve({});
    Eigen::VectorXd q0 = fam.initial_state(m);
    q0.setConstant(0.1);
    const double ratio = rk4_richardson_ratio(as_time_ode(fam.build(m), fam.frequencies(m)), q0, 0.0, 5.0, 100);
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
  }
  o.detail << " RK4 ratio in [" << rmin << ", " << rmax << "];";
  o.require(rmin >= 12.0 && rmax <= 20.0, "RK4 Richardson ratio in [12, 20]");

  // Newton histories collected across the whole suite.
  bool monotone = true;
  for (const auto& h : g_histories) {
    for (std::size_t i = 1; i < h.size(); ++i) monotone = monotone && h[i] <= h[i - 1];
  }
  o.detail << " " << g_histories.size() << " converged runs monotone " << (monotone ? "yes" : "no");
  o.require(monotone, "Newton residual histories nonincreasing");
}

}  // namespace

int main() {
  report("C1", "linear oscillator exactness", criterion1);
  report("C2", "Duffing 3x3 solution error", criterion2);
  report("C3", "Duffing convergence rate", [](Outcome& o) { rate_criterion(o, "duffing", 0.6, 1.1, 300.0); });
  report("C4", "Klein-Gordon convergence rate", [](Outcome& o) {
    rate_criterion(o, "kg", 0.4, 0.75, 600.0);
    criterion4_extra(o);
  });
  report("C5", "SF-HB degrees of freedom", criterion5);
  report("C6", "Duffing spectrum agreement", criterion6);
  report("C7", "property suite", criterion7);
  std::printf("%d of 7 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

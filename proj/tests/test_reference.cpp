#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ttsm/error.hpp"
#include "ttsm/problems.hpp"
#include "ttsm/reference.hpp"
#include "ttsm/solver.hpp"

using namespace ttsm;

TEST(Rk4, FourthOrderOnEveryProblem) {
  for (const auto& name : problem_names()) {
    const ProblemFamily fam = problem_family(name);
    const ParameterMap m = fam.resolve({});
    const TimeOde ode = as_time_ode(fam.build(m), fam.frequencies(m));
    Eigen::VectorXd q0 = fam.initial_state(m);
    q0.setConstant(0.1);
    const double ratio = rk4_richardson_ratio(ode, q0, 0.0, 5.0, 100);
    EXPECT_GE(ratio, 12.0) << name;
    EXPECT_LE(ratio, 20.0) << name;
  }
}

TEST(Rk4, ExactSampleCountAndLinearSolution) {
  const LinearOscillatorParams lp;
  const TimeOde ode = as_time_ode(linear_oscillator_problem(lp), {lp.omega0, lp.omegaf});
  const TimeSeries s = rk4_integrate(ode, Eigen::VectorXd::Zero(1), 0.0, 20.0, 4000);
  ASSERT_EQ(s.size(), 4001u);
  EXPECT_DOUBLE_EQ(s.times.back(), 20.0);
  for (std::size_t i = 0; i < s.size(); i += 250) {
    EXPECT_NEAR(s.states[i][0], linear_oscillator_analytic(s.times[i], lp), 1e-10);
  }
}

TEST(Rk4, BlowUpNamesTime) {
  const TimeOde ode = [](const Eigen::VectorXd& q, double) { return (q.array() * q.array()).matrix().eval(); };
  try {
    rk4_integrate(ode, Eigen::VectorXd::Constant(1, 1.0), 0.0, 5.0, 100);
    FAIL() << "expected SolveError";
  } catch (const SolveError& e) {
    EXPECT_NE(std::string(e.what()).find("t ="), std::string::npos);
  }
}

TEST(Spectrum, PureToneAmplitudeAndLocation) {
  const double w = 1.3, a = 0.7;
  TimeSeries s;
  for (double t : uniform_times(0.0, 400.0, 40001)) {
    s.times.push_back(t);
    s.states.push_back(Eigen::VectorXd::Constant(1, a * std::sin(w * t) + 0.5));
  }
  const Spectrum sp = compute_spectrum(s, 0, 0.0, 400.0);
  const auto peaks = find_peaks(sp, 0.01);
  ASSERT_FALSE(peaks.empty());
  const auto top = *std::max_element(peaks.begin(), peaks.end(),
                                     [](const Peak& x, const Peak& y) { return x.amplitude < y.amplitude; });
  EXPECT_NEAR(top.frequency, w, sp.resolution);
  EXPECT_NEAR(top.amplitude, a, 0.1 * a);
  EXPECT_TRUE(has_peak_near(peaks, w, sp.resolution));
  EXPECT_FALSE(has_peak_near(peaks, 2.0 * w, sp.resolution));
  EXPECT_NEAR(sp.resolution, 2.0 * std::numbers::pi / (40001 * 0.01), 1e-12);
}

TEST(Spectrum, TooShortWindowThrows) {
  TimeSeries s{{0.0, 1.0, 2.0}, {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)}};
  EXPECT_THROW(compute_spectrum(s, 0, 0.0, 2.0), InvalidArgument);
}

TEST(Spectrum, TorusReconstructionStaysOnItsLattice) {
  const ProblemFamily fam = problem_family("duffing");
  const ParameterMap m = fam.resolve({});
  const auto w = fam.frequencies(m);
  const SolveReport r = homotopy_solve(fam.build, fam.standard_schedule(m), make_grid(w, {3, 3}), {});
  ASSERT_TRUE(r.converged);
  const TimeSeries s = torus_to_time(r.solution, uniform_times(0.0, 1000.0, 100001));
  const Spectrum sp = compute_spectrum(s, 0, 0.0, 1000.0);
  for (const Peak& p : find_peaks(sp, 1e-3)) {
    bool on_lattice = false;
    for (int k1 = -1; k1 <= 1; ++k1)
      for (int k2 = -1; k2 <= 1; ++k2)
        on_lattice = on_lattice || std::abs(std::abs(k1 * w[0] + k2 * w[1]) - p.frequency) <= 2 * sp.resolution;
    EXPECT_TRUE(on_lattice) << p.frequency;
  }
}

TEST(TorusToTime, EvaluatesAlongPhaseLine) {
  const LinearOscillatorParams lp;
  const AngularGrid g = make_grid({lp.omega0, lp.omegaf}, {3, 3});
  const ResidualSystem sys(linear_oscillator_problem(lp), g);
  const SolveReport r = newton_solve(sys, sys.zero_field(), {});
  const TimeSeries s = torus_to_time(r.solution, uniform_times(0.0, 1e4, 1001));
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(s.states[i][0], linear_oscillator_analytic(s.times[i], lp), 1e-11);
  }
}

TEST(FieldErrorNorm, ChecksCompatibility) {
  const AngularGrid a = make_grid({1.0, 2.0}, {3, 3});
  const AngularGrid b = make_grid({1.0, 2.5}, {5, 5});
  EXPECT_THROW(field_error_norm(TorusField(a, 1), TorusField(b, 1)), InvalidArgument);
  EXPECT_THROW(field_error_norm(TorusField(a, 1), TorusField(a, 2)), InvalidArgument);
  EXPECT_DOUBLE_EQ(field_error_norm(TorusField(a, 1), TorusField(make_grid({1.0, 2.0}, {7, 7}), 1)), 0.0);
}

TEST(Csv, SeriesAndSpectrumHeaders) {
  TimeSeries s{{0.0, 0.5}, {Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)}};
  std::ostringstream o;
  write_csv(o, s);
  EXPECT_EQ(o.str().substr(0, o.str().find('\n')), "t,q_0,q_1");
  Spectrum sp{{0.0, 1.0}, {0.1, 0.2}, 1.0};
  std::ostringstream o2;
  write_csv(o2, sp);
  EXPECT_EQ(o2.str(), "freq,amplitude\n0,0.10000000000000001\n1,0.20000000000000001\n");
}

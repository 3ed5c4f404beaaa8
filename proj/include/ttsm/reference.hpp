#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "ttsm/grid.hpp"
#include "ttsm/problem.hpp"

namespace ttsm {

/// Uniformly sampled trajectory; one state vector per time.
struct TimeSeries {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
  [[nodiscard]] double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  /// Samples of one state component.
  [[nodiscard]] std::vector<double> component(int c) const;
};

/// Classical fourth-order Runge-Kutta with num_steps uniform steps over
/// [t0, t1]; returns num_steps + 1 samples. Throws SolveError on a
/// non-finite state, naming the time.
TimeSeries rk4_integrate(const TimeOde& ode, const Eigen::VectorXd& q0, double t0, double t1, int num_steps);

/// Step-halving order check: |y_h - y_{h/2}| / |y_{h/2} - y_{h/4}| at t1,
/// max norm. Close to 16 for a fourth-order method.
double rk4_richardson_ratio(const TimeOde& ode, const Eigen::VectorXd& q0, double t0, double t1, int num_steps);

/// q(t) = interpolant(omega_1 t mod 2pi, ..., omega_k t mod 2pi).
TimeSeries torus_to_time(const TorusField& field, std::span<const double> times);

/// `count` samples uniformly spaced over [t0, t1] inclusive.
std::vector<double> uniform_times(double t0, double t1, std::size_t count);

struct Spectrum {
  std::vector<double> frequencies;  ///< rad per unit time, ascending
  std::vector<double> amplitudes;
  double resolution = 0.0;  ///< bin width 2*pi / window length
};

struct Peak {
  double frequency = 0.0;
  double amplitude = 0.0;
};

/// Hann-windowed periodogram of one component over samples with t in
/// [window_start, window_end], after removing the mean. Amplitudes are
/// normalized so that a pure tone A sin(w t) reports A at its bin.
/// Throws InvalidArgument when the window holds fewer than 4 samples.
Spectrum compute_spectrum(const TimeSeries& series, int component, double window_start, double window_end);

/// Local maxima with amplitude >= rel_threshold * (largest amplitude).
std::vector<Peak> find_peaks(const Spectrum& spectrum, double rel_threshold = 0.01);

/// True when some peak lies within `bins` bins of `frequency`.
bool has_peak_near(const std::vector<Peak>& peaks, double frequency, double resolution, double bins = 1.0);

/// Max-norm difference between `field` and the reference interpolant
/// sampled on the field's nodes, over all state components. Throws when the
/// frequencies or state sizes differ.
double field_error_norm(const TorusField& field, const TorusField& reference);

void write_csv(std::ostream& out, const TimeSeries& series);
void write_csv(std::ostream& out, const Spectrum& spectrum);

}  // namespace ttsm

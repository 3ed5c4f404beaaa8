#include "ttsm/reference.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ttsm/error.hpp"
#include "ttsm/spectral.hpp"

namespace ttsm {

std::vector<double> TimeSeries::component(int c) const {
  std::vector<double> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = states[i][c];
  return out;
}

TimeSeries rk4_integrate(const TimeOde& ode, const Eigen::VectorXd& q0, double t0, double t1, int num_steps) {
  if (num_steps < 1) throw InvalidArgument("rk4 needs at least one step");
  const double h = (t1 - t0) / num_steps;
  TimeSeries out;
  out.times.reserve(static_cast<std::size_t>(num_steps) + 1);
  out.states.reserve(static_cast<std::size_t>(num_steps) + 1);
  Eigen::VectorXd q = q0;
  out.times.push_back(t0);
  out.states.push_back(q);
  for (int i = 0; i < num_steps; ++i) {
    const double t = t0 + i * h;
    const Eigen::VectorXd k1 = ode(q, t);
    const Eigen::VectorXd k2 = ode(q + 0.5 * h * k1, t + 0.5 * h);
    const Eigen::VectorXd k3 = ode(q + 0.5 * h * k2, t + 0.5 * h);
    const Eigen::VectorXd k4 = ode(q + h * k3, t + h);
    q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = t0 + (i + 1) * h;
    if (!q.allFinite()) {
      std::ostringstream msg;
      msg << "rk4 state became non-finite at t = " << t_next;
      throw SolveError(msg.str());
    }
    out.times.push_back(t_next);
    out.states.push_back(q);
  }
  return out;
}

double rk4_richardson_ratio(const TimeOde& ode, const Eigen::VectorXd& q0, double t0, double t1, int num_steps) {
  const Eigen::VectorXd y1 = rk4_integrate(ode, q0, t0, t1, num_steps).states.back();
  const Eigen::VectorXd y2 = rk4_integrate(ode, q0, t0, t1, 2 * num_steps).states.back();
  const Eigen::VectorXd y4 = rk4_integrate(ode, q0, t0, t1, 4 * num_steps).states.back();
  return (y1 - y2).lpNorm<Eigen::Infinity>() / (y2 - y4).lpNorm<Eigen::Infinity>();
}

std::vector<double> uniform_times(double t0, double t1, std::size_t count) {
  if (count < 2) throw InvalidArgument("need at least two samples");
  std::vector<double> t(count);
  const double h = (t1 - t0) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) t[i] = t0 + static_cast<double>(i) * h;
  return t;
}

TimeSeries torus_to_time(const TorusField& field, std::span<const double> times) {
  const TrigInterpolant interp(field);
  const auto& w = field.grid().frequencies();
  TimeSeries out;
  out.times.assign(times.begin(), times.end());
  out.states.reserve(times.size());
  std::vector<double> phases(w.size());
  for (double t : times) {
    for (std::size_t j = 0; j < w.size(); ++j) phases[j] = std::fmod(w[j] * t, 2.0 * std::numbers::pi);
    out.states.push_back(interp(phases));
  }
  return out;
}

namespace {

// FFTW planning is not thread-safe.
std::mutex fftw_planner_mutex;

struct FftwDeleter {
  void operator()(double* p) const { fftw_free(p); }
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

}  // namespace

Spectrum compute_spectrum(const TimeSeries& series, int component, double window_start, double window_end) {
  std::vector<double> x;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.times[i] >= window_start && series.times[i] <= window_end) x.push_back(series.states[i][component]);
  }
  if (x.size() < 4) throw InvalidArgument("spectrum window holds fewer than 4 samples");
  const auto n = x.size();
  const double dt = series.step();

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double window_sum = 0.0;
  std::unique_ptr<double, FftwDeleter> in(fftw_alloc_real(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    window_sum += hann;
    in.get()[i] = (x[i] - mean) * hann;
  }
  const std::size_t bins = n / 2 + 1;
  std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(bins));
  fftw_plan plan = nullptr;
  {
    const std::lock_guard lock(fftw_planner_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    const std::lock_guard lock(fftw_planner_mutex);
    fftw_destroy_plan(plan);
  }

  Spectrum s;
  s.resolution = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  s.frequencies.resize(bins);
  s.amplitudes.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    s.frequencies[k] = static_cast<double>(k) * s.resolution;
    s.amplitudes[k] = 2.0 * std::hypot(out.get()[k][0], out.get()[k][1]) / window_sum;
  }
  return s;
}

std::vector<Peak> find_peaks(const Spectrum& spectrum, double rel_threshold) {
  const auto& a = spectrum.amplitudes;
  std::vector<Peak> peaks;
  if (a.size() < 3) return peaks;
  const double top = *std::max_element(a.begin() + 1, a.end());
  for (std::size_t k = 1; k + 1 < a.size(); ++k) {
    if (a[k] > a[k - 1] && a[k] >= a[k + 1] && a[k] >= rel_threshold * top) {
      peaks.push_back({spectrum.frequencies[k], a[k]});
    }
  }
  return peaks;
}

bool has_peak_near(const std::vector<Peak>& peaks, double frequency, double resolution, double bins) {
  return std::any_of(peaks.begin(), peaks.end(),
                     [&](const Peak& p) { return std::abs(p.frequency - frequency) <= bins * resolution; });
}

double field_error_norm(const TorusField& field, const TorusField& reference) {
  if (!field.grid().same_frequencies(reference.grid(), 1e-12)) {
    throw InvalidArgument("field and reference use different frequencies");
  }
  if (field.state_dim() != reference.state_dim()) throw InvalidArgument("field and reference state sizes differ");
  const TorusField sampled = TrigInterpolant(reference).sample_on(field.grid());
  return (field.values() - sampled.values()).lpNorm<Eigen::Infinity>();
}

void write_csv(std::ostream& out, const TimeSeries& series) {
  out << "t";
  const int n = series.states.empty() ? 0 : static_cast<int>(series.states.front().size());
  for (int c = 0; c < n; ++c) out << ",q_" << c;
  out << "\n" << std::setprecision(17);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.times[i];
    for (int c = 0; c < n; ++c) out << "," << series.states[i][c];
    out << "\n";
  }
}

void write_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "freq,amplitude\n" << std::setprecision(17);
  for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k) {
    out << spectrum.frequencies[k] << "," << spectrum.amplitudes[k] << "\n";
  }
}

}  // namespace ttsm

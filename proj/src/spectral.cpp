#include "ttsm/spectral.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>
#include <string>

#include "ttsm/error.hpp"

namespace ttsm {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

// Sizes of the stacked layout split around one axis: `inner` scalars vary
// faster than the axis index, `outer` blocks vary slower.
struct AxisSplit {
  Eigen::Index inner;
  Eigen::Index count;
  Eigen::Index outer;
};

AxisSplit split_axis(const AngularGrid& grid, std::size_t axis, int state_dim) {
  const auto stride = static_cast<Eigen::Index>(grid.node_stride(axis));
  const Eigen::Index count = grid.count(axis);
  const auto nodes = static_cast<Eigen::Index>(grid.num_nodes());
  return {stride * state_dim, count, nodes / (stride * count)};
}

// out(:, a, o) = sum_b op(a, b) in(:, b, o) for every outer block.
template <typename Scalar>
void transform_along_axis(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& op,
                          const AxisSplit& s, const Scalar* in, Scalar* out) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index block = s.inner * s.count;
  for (Eigen::Index o = 0; o < s.outer; ++o) {
    Eigen::Map<const Mat> x(in + o * block, s.inner, s.count);
    Eigen::Map<Mat> y(out + o * block, s.inner, s.count);
    y.noalias() = x * op.transpose();
  }
}

ComplexMatrix forward_dft(int count) {
  const int k_max = (count - 1) / 2;
  ComplexMatrix f(count, count);
  for (int p = 0; p < count; ++p) {
    const int k = p - k_max;
    for (int l = 0; l < count; ++l) {
      const double theta = 2.0 * std::numbers::pi * l / count;
      f(p, l) = std::polar(1.0 / count, -k * theta);
    }
  }
  return f;
}

ComplexMatrix inverse_dft(int count) {
  const int k_max = (count - 1) / 2;
  ComplexMatrix g(count, count);
  for (int l = 0; l < count; ++l) {
    const double theta = 2.0 * std::numbers::pi * l / count;
    for (int p = 0; p < count; ++p) g(l, p) = std::polar(1.0, (p - k_max) * theta);
  }
  return g;
}

}  // namespace

DiffMatrix::DiffMatrix(int size) : size_(size) {
  if (size < 1 || size % 2 == 0) throw InvalidArgument("even grid unsupported");
  entries_ = Eigen::MatrixXd::Zero(size, size);
  for (int j = 0; j < size; ++j) {
    for (int k = 0; k < size; ++k) {
      if (j == k) continue;
      const int d = j - k;
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;
      entries_(j, k) = 0.5 * sign / std::sin(d * std::numbers::pi / size);
    }
  }
}

DiffMatrix spectral_diff_matrix(int size) { return DiffMatrix(size); }

LiftedOperator::LiftedOperator(AngularGrid grid, std::size_t axis, int state_dim, OperatorMode mode)
    : grid_(std::move(grid)),
      axis_(axis),
      state_dim_(state_dim),
      mode_(mode),
      dimension_(0),
      diff_(1) {
  if (axis_ >= grid_.dims()) {
    throw InvalidArgument("axis " + std::to_string(axis_) + " out of range for a " +
                          std::to_string(grid_.dims()) + "-torus");
  }
  if (state_dim_ < 1) throw InvalidArgument("state dimension must be >= 1");
  dimension_ = stacked_size(grid_, state_dim_);
  diff_ = spectral_diff_matrix(grid_.count(axis_));
  if (mode_ == OperatorMode::Dense) matrix_ = dense();
}

Eigen::VectorXd LiftedOperator::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(dimension_);
  apply_add(x, 1.0, y);
  return y;
}

void LiftedOperator::apply_add(const Eigen::VectorXd& x, double scale, Eigen::VectorXd& y) const {
  if (x.size() != dimension_ || y.size() != dimension_) {
    throw InvalidArgument("lifted operator dimension mismatch");
  }
  if (matrix_) {
    y.noalias() += scale * (*matrix_) * x;
    return;
  }
  const AxisSplit s = split_axis(grid_, axis_, state_dim_);
  Eigen::VectorXd tmp(dimension_);
  transform_along_axis<double>(diff_.entries(), s, x.data(), tmp.data());
  y += scale * tmp;
}

Eigen::MatrixXd LiftedOperator::dense() const {
  if (matrix_) return *matrix_;
  if (dimension_ > kMaxDenseDimension) {
    throw InvalidArgument("operator dimension " + std::to_string(dimension_) +
                          " exceeds the dense materialization cap");
  }
  const AxisSplit s = split_axis(grid_, axis_, state_dim_);
  const Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(s.inner, s.inner);
  const Eigen::MatrixXd outer = Eigen::MatrixXd::Identity(s.outer, s.outer);
  const Eigen::MatrixXd mid = Eigen::kroneckerProduct(diff_.entries(), inner);
  return Eigen::kroneckerProduct(outer, mid);
}

LiftedOperator lift_operator(const AngularGrid& grid, std::size_t axis, int state_dim, OperatorMode mode) {
  return LiftedOperator(grid, axis, state_dim, mode);
}

FourierCoefficients::FourierCoefficients(AngularGrid grid, int state_dim,
                                         std::vector<std::complex<double>> values)
    : grid_(std::move(grid)), state_dim_(state_dim), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(values_.size()) != stacked_size(grid_, state_dim_)) {
    throw InvalidArgument("coefficient array size mismatch");
  }
}

std::complex<double> FourierCoefficients::at(std::span<const int> wavenumbers, int component) const {
  if (wavenumbers.size() != grid_.dims()) throw InvalidArgument("wave number rank mismatch");
  if (component < 0 || component >= state_dim_) throw InvalidArgument("component out of range");
  std::vector<int> idx(wavenumbers.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const int k_max = grid_.max_wavenumber(j);
    if (std::abs(wavenumbers[j]) > k_max) return {0.0, 0.0};
    idx[j] = wavenumbers[j] + k_max;
  }
  return values_[grid_.linear_index(idx) * static_cast<std::size_t>(state_dim_) +
                 static_cast<std::size_t>(component)];
}

double FourierCoefficients::max_abs_excluding(const std::vector<std::vector<int>>& keep) const {
  double worst = 0.0;
  for (std::size_t node = 0; node < grid_.num_nodes(); ++node) {
    auto idx = grid_.multi_index(node);
    for (std::size_t j = 0; j < idx.size(); ++j) idx[j] -= grid_.max_wavenumber(j);
    bool kept = false;
    for (const auto& k : keep) kept = kept || k == idx;
    if (kept) continue;
    for (int c = 0; c < state_dim_; ++c) {
      worst = std::max(worst, std::abs(values_[node * static_cast<std::size_t>(state_dim_) +
                                               static_cast<std::size_t>(c)]));
    }
  }
  return worst;
}

FourierCoefficients dft_coefficients(const TorusField& field) {
  const auto& grid = field.grid();
  std::vector<std::complex<double>> a(field.values().begin(), field.values().end());
  std::vector<std::complex<double>> b(a.size());
  for (std::size_t j = 0; j < grid.dims(); ++j) {
    transform_along_axis<std::complex<double>>(forward_dft(grid.count(j)),
                                               split_axis(grid, j, field.state_dim()), a.data(), b.data());
    a.swap(b);
  }
  return FourierCoefficients(grid, field.state_dim(), std::move(a));
}

TorusField resynthesize(const FourierCoefficients& coeffs) {
  const auto& grid = coeffs.grid();
  std::vector<std::complex<double>> a = coeffs.values();
  std::vector<std::complex<double>> b(a.size());
  for (std::size_t j = 0; j < grid.dims(); ++j) {
    transform_along_axis<std::complex<double>>(inverse_dft(grid.count(j)),
                                               split_axis(grid, j, coeffs.state_dim()), a.data(), b.data());
    a.swap(b);
  }
  Eigen::VectorXd values(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) values[static_cast<Eigen::Index>(i)] = a[i].real();
  return TorusField(grid, coeffs.state_dim(), std::move(values));
}

TrigInterpolant::TrigInterpolant(const TorusField& field) : coeffs_(dft_coefficients(field)) {}

Eigen::VectorXd TrigInterpolant::operator()(std::span<const double> phases) const {
  const auto& grid = coeffs_.grid();
  const std::size_t dims = grid.dims();
  if (phases.size() != dims) throw InvalidArgument("phase count does not match torus dimension");
  const int n = coeffs_.state_dim();

  // Per-axis Fourier factors exp(i k theta_j), k = -K..K.
  std::vector<std::vector<std::complex<double>>> factors(dims);
  for (std::size_t j = 0; j < dims; ++j) {
    const int k_max = grid.max_wavenumber(j);
    factors[j].resize(static_cast<std::size_t>(grid.count(j)));
    for (int p = 0; p < grid.count(j); ++p) {
      factors[j][static_cast<std::size_t>(p)] = std::polar(1.0, (p - k_max) * phases[j]);
    }
  }

  const auto& values = coeffs_.values();
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
  std::vector<int> idx(dims, 0);
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    std::complex<double> weight = 1.0;
    for (std::size_t j = 0; j < dims; ++j) weight *= factors[j][static_cast<std::size_t>(idx[j])];
    const std::size_t base = node * static_cast<std::size_t>(n);
    for (int c = 0; c < n; ++c) acc[c] += weight * values[base + static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < dims; ++j) {
      if (++idx[j] < grid.count(j)) break;
      idx[j] = 0;
    }
  }
  // Odd counts carry no Nyquist mode, so the imaginary part cancels.
  return acc.real();
}

TorusField TrigInterpolant::sample_on(const AngularGrid& target) const {
  return sample_function(target, [this](std::span<const double> phases) { return (*this)(phases); },
                         state_dim());
}

Eigen::VectorXd trig_interpolate(const TorusField& field, std::span<const double> phases) {
  return TrigInterpolant(field)(phases);
}

}  // namespace ttsm

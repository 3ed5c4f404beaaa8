#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ttsm/grid.hpp"

namespace ttsm {

/// Fourier spectral differentiation matrix on an odd number of equispaced
/// nodes over [0, 2*pi). Antisymmetric and circulant.
class DiffMatrix {
 public:
  explicit DiffMatrix(int size);

  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  [[nodiscard]] double operator()(int j, int k) const { return entries_(j, k); }

 private:
  int size_;
  Eigen::MatrixXd entries_;
};

/// D[j][k] = (-1)^(j-k)/2 * csc((j-k)*pi/size) off the diagonal, zero on it.
/// Throws InvalidArgument("even grid unsupported") for even or nonpositive sizes.
DiffMatrix spectral_diff_matrix(int size);

enum class OperatorMode { Dense, MatrixFree };

/// Largest stacked dimension that may be materialized densely.
inline constexpr Eigen::Index kMaxDenseDimension = 20000;

/// Differentiation along one torus angle, lifted to stacked vectors:
/// (... (x) I (x) D_axis (x) I (x) ...) (x) I_n.
class LiftedOperator {
 public:
  LiftedOperator(AngularGrid grid, std::size_t axis, int state_dim, OperatorMode mode);

  [[nodiscard]] std::size_t axis() const noexcept { return axis_; }
  [[nodiscard]] const AngularGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] int state_dim() const noexcept { return state_dim_; }
  [[nodiscard]] OperatorMode mode() const noexcept { return mode_; }
  [[nodiscard]] Eigen::Index dimension() const noexcept { return dimension_; }
  [[nodiscard]] const DiffMatrix& diff() const noexcept { return diff_; }

  /// y = op * x.
  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// y += scale * op * x, without temporaries.
  void apply_add(const Eigen::VectorXd& x, double scale, Eigen::VectorXd& y) const;

  /// The materialized matrix; built on demand for matrix-free operators
  /// within the dense cap.
  [[nodiscard]] Eigen::MatrixXd dense() const;

 private:
  AngularGrid grid_;
  std::size_t axis_;
  int state_dim_;
  OperatorMode mode_;
  Eigen::Index dimension_;
  DiffMatrix diff_;
  std::optional<Eigen::MatrixXd> matrix_;
};

/// Axis is zero-based. Throws InvalidArgument when out of range, or when a
/// dense operator would exceed kMaxDenseDimension.
LiftedOperator lift_operator(const AngularGrid& grid, std::size_t axis, int state_dim, OperatorMode mode);

/// Discrete Fourier coefficients of a field, indexed by wave numbers
/// |k_j| <= K_j. Normalized so that a constant field c has c_0 = c and
/// cos(theta) has +-1/2 at k = +-1.
class FourierCoefficients {
 public:
  FourierCoefficients(AngularGrid grid, int state_dim, std::vector<std::complex<double>> values);

  [[nodiscard]] const AngularGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] int state_dim() const noexcept { return state_dim_; }

  [[nodiscard]] std::complex<double> at(std::span<const int> wavenumbers, int component) const;
  [[nodiscard]] std::complex<double> at(std::initializer_list<int> wavenumbers, int component) const {
    return at(std::span<const int>(wavenumbers.begin(), wavenumbers.size()), component);
  }

  /// Flat storage: component fastest, then (k_0 + K_0), then (k_1 + K_1), ...
  [[nodiscard]] const std::vector<std::complex<double>>& values() const noexcept { return values_; }

  /// Largest coefficient magnitude over every wave number not in `keep`.
  [[nodiscard]] double max_abs_excluding(const std::vector<std::vector<int>>& keep) const;

 private:
  AngularGrid grid_;
  int state_dim_;
  std::vector<std::complex<double>> values_;
};

FourierCoefficients dft_coefficients(const TorusField& field);

/// Inverse of dft_coefficients: nodal values from coefficients.
TorusField resynthesize(const FourierCoefficients& coeffs);

/// Evaluates the k-variate trigonometric interpolant of a field at arbitrary
/// phases. Coefficients are computed once at construction.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const TorusField& field);

  [[nodiscard]] const AngularGrid& grid() const noexcept { return coeffs_.grid(); }
  [[nodiscard]] int state_dim() const noexcept { return coeffs_.state_dim(); }

  [[nodiscard]] Eigen::VectorXd operator()(std::span<const double> phases) const;

  /// Samples the interpolant on another grid.
  [[nodiscard]] TorusField sample_on(const AngularGrid& target) const;

 private:
  FourierCoefficients coeffs_;
};

Eigen::VectorXd trig_interpolate(const TorusField& field, std::span<const double> phases);

}  // namespace ttsm

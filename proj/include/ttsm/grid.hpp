#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ttsm {

/// Tensor-product collocation grid on the k-torus.
///
/// Axis j carries counts[j] equispaced angles 2*pi*l/counts[j]. Stacked
/// vectors use the canonical layout in which the state component varies
/// fastest, then axis 0, then axis 1, and so on:
///
///   index = c + n * (l_0 + counts[0] * (l_1 + counts[1] * (...)))
///
/// Rational independence of the frequencies is the caller's responsibility.
class AngularGrid {
 public:
  AngularGrid(std::vector<double> frequencies, std::vector<int> counts);

  [[nodiscard]] std::size_t dims() const noexcept { return counts_.size(); }
  [[nodiscard]] const std::vector<double>& frequencies() const noexcept { return frequencies_; }
  [[nodiscard]] const std::vector<int>& counts() const noexcept { return counts_; }
  [[nodiscard]] double frequency(std::size_t axis) const { return frequencies_.at(axis); }
  [[nodiscard]] int count(std::size_t axis) const { return counts_.at(axis); }

  /// Highest resolved wave number along an axis, (count - 1) / 2.
  [[nodiscard]] int max_wavenumber(std::size_t axis) const { return (count(axis) - 1) / 2; }

  /// Product of the per-axis counts.
  [[nodiscard]] std::size_t num_nodes() const noexcept { return num_nodes_; }

  [[nodiscard]] double angle(std::size_t axis, int l) const;

  /// Linear node index -> per-axis indices, axis 0 fastest.
  [[nodiscard]] std::vector<int> multi_index(std::size_t node) const;
  [[nodiscard]] std::size_t linear_index(std::span<const int> multi) const;

  /// Phases of a node, one angle per axis.
  [[nodiscard]] std::vector<double> node_phases(std::size_t node) const;

  /// Stride (in nodes) between consecutive indices along an axis.
  [[nodiscard]] std::size_t node_stride(std::size_t axis) const;

  [[nodiscard]] bool same_frequencies(const AngularGrid& other, double tol = 0.0) const;

 private:
  std::vector<double> frequencies_;
  std::vector<int> counts_;
  std::size_t num_nodes_ = 1;
};

/// Builds a grid after validating lengths, odd counts and positive frequencies.
AngularGrid make_grid(std::vector<double> frequencies, std::vector<int> counts);

/// Stacked nodal state over a grid.
class TorusField {
 public:
  TorusField(AngularGrid grid, int state_dim);
  TorusField(AngularGrid grid, int state_dim, Eigen::VectorXd values);

  [[nodiscard]] const AngularGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] int state_dim() const noexcept { return state_dim_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return values_.size(); }

  [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }
  [[nodiscard]] Eigen::VectorXd& values() noexcept { return values_; }

  [[nodiscard]] auto node(std::size_t i) const {
    return values_.segment(static_cast<Eigen::Index>(i) * state_dim_, state_dim_);
  }
  [[nodiscard]] auto node(std::size_t i) {
    return values_.segment(static_cast<Eigen::Index>(i) * state_dim_, state_dim_);
  }

 private:
  AngularGrid grid_;
  int state_dim_;
  Eigen::VectorXd values_;
};

using PhaseFunction = std::function<Eigen::VectorXd(std::span<const double> phases)>;

/// Samples a function of the torus phases at every node.
TorusField sample_function(const AngularGrid& grid, const PhaseFunction& fn, int state_dim);

/// Stacked size n * prod(counts).
[[nodiscard]] inline Eigen::Index stacked_size(const AngularGrid& grid, int state_dim) {
  return static_cast<Eigen::Index>(grid.num_nodes()) * state_dim;
}

/// Reorders a field into the alternate layout where the last axis varies
/// fastest (state component still innermost), and back.
Eigen::VectorXd to_reversed_layout(const TorusField& field);
TorusField from_reversed_layout(const AngularGrid& grid, int state_dim, const Eigen::VectorXd& values);

}  // namespace ttsm

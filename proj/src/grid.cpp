#include "ttsm/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ttsm/error.hpp"

namespace ttsm {

AngularGrid::AngularGrid(std::vector<double> frequencies, std::vector<int> counts)
    : frequencies_(std::move(frequencies)), counts_(std::move(counts)) {
  if (frequencies_.empty()) throw InvalidArgument("grid needs at least one axis");
  if (frequencies_.size() != counts_.size()) {
    throw InvalidArgument("grid has " + std::to_string(frequencies_.size()) + " frequencies but " +
                          std::to_string(counts_.size()) + " counts");
  }
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    if (counts_[j] < 1 || counts_[j] % 2 == 0) throw InvalidArgument("even grid unsupported");
    if (!(frequencies_[j] > 0.0) || !std::isfinite(frequencies_[j])) {
      throw InvalidArgument("frequency " + std::to_string(j) + " must be positive");
    }
    num_nodes_ *= static_cast<std::size_t>(counts_[j]);
  }
}

double AngularGrid::angle(std::size_t axis, int l) const {
  return 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(count(axis));
}

std::vector<int> AngularGrid::multi_index(std::size_t node) const {
  std::vector<int> idx(dims());
  for (std::size_t j = 0; j < dims(); ++j) {
    const auto c = static_cast<std::size_t>(counts_[j]);
    idx[j] = static_cast<int>(node % c);
    node /= c;
  }
  return idx;
}

std::size_t AngularGrid::linear_index(std::span<const int> multi) const {
  if (multi.size() != dims()) throw InvalidArgument("multi-index rank mismatch");
  std::size_t node = 0;
  for (std::size_t j = dims(); j-- > 0;) {
    if (multi[j] < 0 || multi[j] >= counts_[j]) throw InvalidArgument("multi-index out of range");
    node = node * static_cast<std::size_t>(counts_[j]) + static_cast<std::size_t>(multi[j]);
  }
  return node;
}

std::vector<double> AngularGrid::node_phases(std::size_t node) const {
  std::vector<double> phases(dims());
  for (std::size_t j = 0; j < dims(); ++j) {
    const auto c = static_cast<std::size_t>(counts_[j]);
    phases[j] = angle(j, static_cast<int>(node % c));
    node /= c;
  }
  return phases;
}

std::size_t AngularGrid::node_stride(std::size_t axis) const {
  std::size_t stride = 1;
  for (std::size_t j = 0; j < axis; ++j) stride *= static_cast<std::size_t>(counts_.at(j));
  return stride;
}

bool AngularGrid::same_frequencies(const AngularGrid& other, double tol) const {
  if (dims() != other.dims()) return false;
  for (std::size_t j = 0; j < dims(); ++j) {
    if (std::abs(frequencies_[j] - other.frequencies_[j]) > tol * std::abs(frequencies_[j])) {
      return false;
    }
  }
  return true;
}

AngularGrid make_grid(std::vector<double> frequencies, std::vector<int> counts) {
  return AngularGrid(std::move(frequencies), std::move(counts));
}

TorusField::TorusField(AngularGrid grid, int state_dim)
    : grid_(std::move(grid)), state_dim_(state_dim) {
  if (state_dim_ < 1) throw InvalidArgument("state dimension must be >= 1");
  values_ = Eigen::VectorXd::Zero(stacked_size(grid_, state_dim_));
}

TorusField::TorusField(AngularGrid grid, int state_dim, Eigen::VectorXd values)
    : grid_(std::move(grid)), state_dim_(state_dim), values_(std::move(values)) {
  if (state_dim_ < 1) throw InvalidArgument("state dimension must be >= 1");
  if (values_.size() != stacked_size(grid_, state_dim_)) {
    throw InvalidArgument("field length " + std::to_string(values_.size()) + " does not match grid (" +
                          std::to_string(stacked_size(grid_, state_dim_)) + ")");
  }
}

TorusField sample_function(const AngularGrid& grid, const PhaseFunction& fn, int state_dim) {
  TorusField field(grid, state_dim);
  for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
    const auto phases = grid.node_phases(i);
    Eigen::VectorXd value = fn(phases);
    if (value.size() != state_dim) throw InvalidArgument("sampled function returned wrong state size");
    field.node(i) = value;
  }
  return field;
}

namespace {

std::size_t reversed_node(const AngularGrid& grid, std::size_t node) {
  const auto idx = grid.multi_index(node);
  std::size_t out = 0;
  for (std::size_t j = 0; j < grid.dims(); ++j) {
    out = out * static_cast<std::size_t>(grid.count(j)) + static_cast<std::size_t>(idx[j]);
  }
  return out;
}

}  // namespace

Eigen::VectorXd to_reversed_layout(const TorusField& field) {
  const int n = field.state_dim();
  Eigen::VectorXd out(field.size());
  for (std::size_t i = 0; i < field.grid().num_nodes(); ++i) {
    out.segment(static_cast<Eigen::Index>(reversed_node(field.grid(), i)) * n, n) = field.node(i);
  }
  return out;
}

TorusField from_reversed_layout(const AngularGrid& grid, int state_dim, const Eigen::VectorXd& values) {
  TorusField field(grid, state_dim);
  if (values.size() != field.size()) throw InvalidArgument("reversed layout length mismatch");
  for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
    field.node(i) = values.segment(static_cast<Eigen::Index>(reversed_node(grid, i)) * state_dim, state_dim);
  }
  return field;
}

}  // namespace ttsm

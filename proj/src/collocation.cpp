#include "ttsm/collocation.hpp"

#include <string>

#include "ttsm/error.hpp"

namespace ttsm {

ResidualSystem::ResidualSystem(TorusProblem problem, AngularGrid grid, bool apply_anchor, OperatorMode op_mode)
    : problem_(std::move(problem)), grid_(std::move(grid)), dimension_(0) {
  if (static_cast<int>(grid_.dims()) != problem_.torus_dim) {
    throw InvalidArgument("problem '" + problem_.label + "' lives on a " + std::to_string(problem_.torus_dim) +
                          "-torus but the grid has " + std::to_string(grid_.dims()) + " axes");
  }
  dimension_ = stacked_size(grid_, problem_.state_dim);
  ops_.reserve(grid_.dims());
  for (std::size_t j = 0; j < grid_.dims(); ++j) ops_.push_back(lift_operator(grid_, j, problem_.state_dim, op_mode));

  if (apply_anchor && problem_.anchor) {
    const Anchor& a = *problem_.anchor;
    const auto node = static_cast<Eigen::Index>(grid_.linear_index(a.node));
    const auto comps = a.constrained_components(problem_.state_dim);
    if (a.value.size() != static_cast<Eigen::Index>(comps.size())) {
      throw InvalidArgument("anchor value has " + std::to_string(a.value.size()) + " entries for " +
                            std::to_string(comps.size()) + " components");
    }
    anchor_values_ = a.value;
    for (int c : comps) {
      if (c < 0 || c >= problem_.state_dim) throw InvalidArgument("anchor component out of range");
      anchor_rows_.push_back(node * problem_.state_dim + c);
    }
  }
}

Eigen::VectorXd ResidualSystem::apply_transport(const Eigen::VectorXd& q) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension_);
  for (std::size_t j = 0; j < ops_.size(); ++j) ops_[j].apply_add(q, grid_.frequency(j), out);
  return out;
}

namespace {

void check_field(const ResidualSystem& sys, const TorusField& qhat) {
  if (qhat.state_dim() != sys.state_dim() || qhat.size() != sys.dimension() ||
      qhat.grid().counts() != sys.grid().counts()) {
    throw InvalidArgument("field does not match the residual system dimensions");
  }
}

}  // namespace

Eigen::VectorXd assemble_residual(const ResidualSystem& sys, const TorusField& qhat) {
  check_field(sys, qhat);
  Eigen::VectorXd r = sys.apply_transport(qhat.values());
  const int n = sys.state_dim();
  const auto& grid = sys.grid();
  for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
    const auto phases = grid.node_phases(i);
    const Eigen::VectorXd q = qhat.node(i);
    r.segment(static_cast<Eigen::Index>(i) * n, n) -= sys.problem_.rhs(q, phases);
  }
  for (std::size_t a = 0; a < sys.anchor_rows_.size(); ++a) {
    const Eigen::Index row = sys.anchor_rows_[a];
    r[row] = qhat.values()[row] - sys.anchor_values_[static_cast<Eigen::Index>(a)];
  }
  return r;
}

JacobianOperator assemble_jacobian(const ResidualSystem& sys, const TorusField& qhat, OperatorMode mode) {
  check_field(sys, qhat);
  const int n = sys.state_dim();
  const auto& grid = sys.grid();
  const Eigen::Index dim = sys.dimension();

  std::vector<Eigen::MatrixXd> blocks(grid.num_nodes());
  for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
    const auto phases = grid.node_phases(i);
    blocks[i] = sys.problem().rhs_jacobian(qhat.node(i), phases);
    if (blocks[i].rows() != n || blocks[i].cols() != n) throw InvalidArgument("rhs_jacobian has wrong shape");
  }
  const auto& anchor_rows = sys.anchor_rows();

  JacobianOperator jac;
  jac.dimension = dim;
  if (mode == OperatorMode::Dense) {
    if (dim > kMaxDenseDimension) throw InvalidArgument("Jacobian too large for dense assembly");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t j = 0; j < sys.lifted_ops().size(); ++j) m += grid.frequency(j) * sys.lifted_ops()[j].dense();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto off = static_cast<Eigen::Index>(i) * n;
      m.block(off, off, n, n) -= blocks[i];
    }
    for (Eigen::Index row : anchor_rows) {
      m.row(row).setZero();
      m(row, row) = 1.0;
    }
    jac.matrix = m;
    jac.apply = [mat = std::move(m)](const Eigen::VectorXd& v) -> Eigen::VectorXd { return mat * v; };
    return jac;
  }

  jac.apply = [&sys, blocks = std::move(blocks), anchor_rows, n](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd out = sys.apply_transport(v);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto off = static_cast<Eigen::Index>(i) * n;
      out.segment(off, n).noalias() -= blocks[i] * v.segment(off, n);
    }
    for (Eigen::Index row : anchor_rows) out[row] = v[row];
    return out;
  };
  return jac;
}

double truncation_error_probe(const TorusProblem& problem, const AngularGrid& coarse_grid,
                              const TorusField& fine_field) {
  if (!coarse_grid.same_frequencies(fine_field.grid(), 1e-12)) {
    throw InvalidArgument("coarse and fine grids use different frequencies");
  }
  const TorusField sampled = TrigInterpolant(fine_field).sample_on(coarse_grid);
  const ResidualSystem sys(problem, coarse_grid, /*apply_anchor=*/false);
  return assemble_residual(sys, sampled).lpNorm<Eigen::Infinity>();
}

}  // namespace ttsm

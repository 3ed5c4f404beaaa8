#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ttsm/collocation.hpp"
#include "ttsm/error.hpp"
#include "ttsm/problems.hpp"
#include "ttsm/solver.hpp"

using namespace ttsm;

namespace {

// Two-state nonlinear test system with explicit phase dependence on every axis.
TorusProblem toy_problem(int torus_dim) {
  TorusProblem p;
  p.label = "toy";
  p.state_dim = 2;
  p.torus_dim = torus_dim;
  p.rhs = [](const Eigen::VectorXd& q, std::span<const double> th) {
    double s = 0.0;
    for (double t : th) s += t;
    Eigen::VectorXd f(2);
    f[0] = q[1] + std::sin(th[0]) * q[0] * q[0];
    f[1] = -q[0] * q[0] * q[0] + 0.3 * q[1] * std::cos(th.back()) + std::cos(s);
    return f;
  };
  p.rhs_jacobian = [](const Eigen::VectorXd& q, std::span<const double> th) {
    Eigen::MatrixXd j(2, 2);
    j << 2.0 * std::sin(th[0]) * q[0], 1.0, -3.0 * q[0] * q[0], 0.3 * std::cos(th.back());
    return j;
  };
  return p;
}

TorusField random_field(const AngularGrid& grid, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TorusField f(grid, n);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.values()[i] = u(rng);
  return f;
}

// Residual by direct loops over nodes, with the differentiation entries
// evaluated from the closed form at each use.
Eigen::VectorXd nodal_loop_residual(const TorusProblem& p, const AngularGrid& g, const TorusField& q) {
  const int n = p.state_dim;
  Eigen::VectorXd r(q.size());
  for (std::size_t node = 0; node < g.num_nodes(); ++node) {
    const auto idx = g.multi_index(node);
    Eigen::VectorXd dq = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < g.dims(); ++j) {
      const int m = g.count(j);
      for (int l = 0; l < m; ++l) {
        const int diff = idx[j] - l;
        if (diff == 0) continue;
        const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
        const double djl = 0.5 * sign / std::sin(diff * std::numbers::pi / m);
        auto other = idx;
        other[j] = l;
        dq += g.frequency(j) * djl * q.node(g.linear_index(other));
      }
    }
    r.segment(static_cast<Eigen::Index>(node) * n, n) = dq - p.rhs(q.node(node), g.node_phases(node));
  }
  return r;
}

}  // namespace

TEST(Residual, MatchesNodalLoopOracle) {
  std::mt19937_64 rng(21);
  const std::vector<std::vector<int>> shapes{{7}, {3, 5}, {5, 5}, {3, 5, 3}};
  for (const auto& counts : shapes) {
    std::vector<double> w{1.0, std::numbers::sqrt2, std::numbers::pi / 3};
    w.resize(counts.size());
    const AngularGrid g = make_grid(w, counts);
    const TorusProblem p = toy_problem(static_cast<int>(counts.size()));
    const TorusField q = random_field(g, 2, rng);
    const Eigen::VectorXd oracle = nodal_loop_residual(p, g, q);
    for (auto mode : {OperatorMode::MatrixFree, OperatorMode::Dense}) {
      const ResidualSystem sys(p, g, true, mode);
      EXPECT_LT((assemble_residual(sys, q) - oracle).lpNorm<Eigen::Infinity>(), 1e-13) << counts.size();
    }
  }
}

TEST(Residual, InvariantUnderAxisReordering) {
  std::mt19937_64 rng(4);
  const AngularGrid g = make_grid({1.0, std::numbers::sqrt2}, {3, 5});
  const AngularGrid gs = make_grid({std::numbers::sqrt2, 1.0}, {5, 3});
  const TorusProblem p = toy_problem(2);
  TorusProblem ps = p;
  ps.rhs = [f = p.rhs](const Eigen::VectorXd& q, std::span<const double> th) {
    const double sw[2] = {th[1], th[0]};
    return f(q, sw);
  };
  const TorusField q = random_field(g, 2, rng);
  const TorusField qs(gs, 2, to_reversed_layout(q));
  const TorusField r(g, 2, assemble_residual(ResidualSystem(p, g), q));
  const Eigen::VectorXd rs = assemble_residual(ResidualSystem(ps, gs), qs);
  EXPECT_LT((rs - to_reversed_layout(r)).lpNorm<Eigen::Infinity>(), 1e-13);
}

TEST(Residual, TorusDimensionMismatchThrows) {
  const AngularGrid g = make_grid({1.0, 2.0}, {3, 3});
  EXPECT_THROW(ResidualSystem(toy_problem(3), g), InvalidArgument);
}

TEST(Residual, AnchorReplacesRows) {
  const LinearOscillatorParams lp;
  const AngularGrid g = make_grid({lp.omega0, lp.omegaf}, {3, 3});
  const ResidualSystem sys(linear_oscillator_problem(lp), g);
  ASSERT_TRUE(sys.anchor_applied());
  ASSERT_EQ(sys.anchor_rows().size(), 1u);
  TorusField q = sys.zero_field();
  q.values()[sys.anchor_rows()[0]] = 0.75;
  EXPECT_DOUBLE_EQ(assemble_residual(sys, q)[sys.anchor_rows()[0]], 0.75);
}

TEST(Jacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  struct Case {
    TorusProblem problem;
    AngularGrid grid;
  };
  KleinGordonParams kg;
  kg.nx = 4;
  std::vector<Case> cases{
      {toy_problem(2), make_grid({1.0, std::numbers::sqrt2}, {3, 5})},
      {toy_problem(3), make_grid({1.0, 1.3, 0.7}, {3, 3, 3})},
      {duffing_problem({}), make_grid({1.0, std::numbers::sqrt2}, {5, 5})},
      {klein_gordon_problem(kg), make_grid({1.0, std::numbers::sqrt2}, {3, 3})},
      {linear_oscillator_problem({}), make_grid({1.0, std::numbers::sqrt2}, {3, 3})},
  };
  for (const auto& c : cases) {
    const ResidualSystem sys(c.problem, c.grid);
    const TorusField q = random_field(c.grid, c.problem.state_dim, rng);
    const JacobianOperator jd = assemble_jacobian(sys, q, OperatorMode::Dense);
    const JacobianOperator jm = assemble_jacobian(sys, q, OperatorMode::MatrixFree);
    ASSERT_TRUE(jd.matrix.has_value());
    EXPECT_FALSE(jm.matrix.has_value());
    Eigen::MatrixXd fd(sys.dimension(), sys.dimension());
    for (Eigen::Index col = 0; col < sys.dimension(); ++col) {
      const double h = 1e-6 * (1.0 + std::abs(q.values()[col]));
      TorusField qp = q, qm = q;
      qp.values()[col] += h;
      qm.values()[col] -= h;
      fd.col(col) = (assemble_residual(sys, qp) - assemble_residual(sys, qm)) / (2 * h);
    }
    const double rel = (fd - *jd.matrix).lpNorm<Eigen::Infinity>() / std::max(1.0, jd.matrix->lpNorm<Eigen::Infinity>());
    EXPECT_LT(rel, 1e-5) << c.problem.label;
    const Eigen::VectorXd x = Eigen::VectorXd::Random(sys.dimension());
    EXPECT_LT((jm.apply(x) - *jd.matrix * x).lpNorm<Eigen::Infinity>(), 1e-12) << c.problem.label;
    EXPECT_LT((jd.apply(x) - *jd.matrix * x).lpNorm<Eigen::Infinity>(), 1e-12) << c.problem.label;
  }
}

TEST(Jacobian, AnchorRestoresRank) {
  const LinearOscillatorParams lp;
  for (int n : {3, 5, 7}) {
    const AngularGrid g = make_grid({lp.omega0, lp.omegaf}, {n, n});
    const TorusProblem p = linear_oscillator_problem(lp);

    const ResidualSystem free_sys(p, g, false);
    const Eigen::MatrixXd jf = *assemble_jacobian(free_sys, free_sys.zero_field(), OperatorMode::Dense).matrix;
    EXPECT_LT((jf * Eigen::VectorXd::Ones(jf.cols())).lpNorm<Eigen::Infinity>(), 1e-12);
    Eigen::JacobiSVD<Eigen::MatrixXd> svf(jf);
    EXPECT_LT(svf.singularValues().minCoeff(), 1e-12);
    EXPECT_GT(svf.singularValues()(svf.singularValues().size() - 2), 1e-3);

    const ResidualSystem sys(p, g);
    const Eigen::MatrixXd ja = *assemble_jacobian(sys, sys.zero_field(), OperatorMode::Dense).matrix;
    Eigen::JacobiSVD<Eigen::MatrixXd> sva(ja);
    EXPECT_GT(sva.singularValues().minCoeff(), 1e-3) << n;
  }
}

TEST(TruncationProbe, DecaysForDuffing) {
  NewtonConfig cfg;
  const ProblemFamily fam = problem_family("duffing");
  const ParameterMap params = fam.resolve({});
  const AngularGrid fine = make_grid(fam.frequencies(params), {21, 21});
  const SolveReport ref = homotopy_solve(fam.build, fam.standard_schedule(params), fine, cfg);
  ASSERT_TRUE(ref.converged);
  const TorusProblem p = fam.build(params);
  double prev = 1.0;
  for (int n : {5, 7, 9, 11}) {
    const double probe = truncation_error_probe(p, make_grid(fam.frequencies(params), {n, n}), ref.solution);
    EXPECT_LT(probe, prev) << n;
    prev = probe;
  }
  EXPECT_LT(prev, 1e-3);
  // The probe of a field on its own grid is its unanchored residual.
  EXPECT_LT(truncation_error_probe(p, fine, ref.solution), 1e-9);
}

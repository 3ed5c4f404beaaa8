#include "ttsm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ttsm/error.hpp"

namespace ttsm {

TorusProblem linear_oscillator_problem(const LinearOscillatorParams& p) {
  if (!(p.omega0 > 0.0 && p.omegaf > 0.0)) throw InvalidArgument("linear oscillator frequencies must be positive");
  TorusProblem problem;
  problem.label = "linear";
  problem.state_dim = 1;
  problem.torus_dim = 2;
  problem.rhs = [](const Eigen::VectorXd&, std::span<const double> th) {
    return Eigen::VectorXd::Constant(1, std::sin(th[0]) + std::cos(th[1]));
  };
  problem.rhs_jacobian = [](const Eigen::VectorXd&, std::span<const double>) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  problem.anchor = Anchor{{0, 0}, Eigen::VectorXd::Zero(1), {0}};
  return problem;
}

double linear_oscillator_analytic(double t, const LinearOscillatorParams& p) {
  return 1.0 / p.omega0 - std::cos(p.omega0 * t) / p.omega0 + std::sin(p.omegaf * t) / p.omegaf;
}

double linear_oscillator_torus(std::span<const double> phases, const LinearOscillatorParams& p) {
  return 1.0 / p.omega0 - std::cos(phases[0]) / p.omega0 + std::sin(phases[1]) / p.omegaf;
}

TorusProblem duffing_problem(const DuffingParams& p) {
  if (!(p.delta > 0.0)) throw InvalidArgument("Duffing damping must be positive");
  TorusProblem problem;
  problem.label = "duffing";
  problem.state_dim = 2;
  problem.torus_dim = 2;
  problem.rhs = [p](const Eigen::VectorXd& q, std::span<const double> th) {
    Eigen::VectorXd f(2);
    f[0] = q[1];
    f[1] = -p.delta * q[1] - p.beta * q[0] - p.alpha * q[0] * q[0] * q[0] + p.f1 * std::cos(th[0]) +
           p.f2 * std::cos(th[1]);
    return f;
  };
  problem.rhs_jacobian = [p](const Eigen::VectorXd& q, std::span<const double>) {
    Eigen::MatrixXd j(2, 2);
    j << 0.0, 1.0, -p.beta - 3.0 * p.alpha * q[0] * q[0], -p.delta;
    return j;
  };
  return problem;
}

DuffingParams duffing_weak_point(DuffingParams target) {
  target.alpha = 1.0;
  target.f1 = 0.02;
  target.f2 = 0.015;
  return target;
}

Eigen::MatrixXd kg_second_difference(const KleinGordonParams& p) {
  const int nx = p.nx;
  const double h2 = p.spacing() * p.spacing();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nx, nx);
  if (p.fd_order == 2) {
    for (int i = 0; i < nx; ++i) {
      d(i, i) = -2.0 / h2;
      if (i > 0) d(i, i - 1) = 1.0 / h2;
      if (i + 1 < nx) d(i, i + 1) = 1.0 / h2;
    }
    return d;
  }
  if (p.fd_order != 4) throw InvalidArgument("fd_order must be 2 or 4");
  // Five-point stencil; ghost values beyond the walls come from the odd
  // reflection q(-x) = -q(x) implied by the Dirichlet ends.
  const double w[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
  for (int i = 0; i < nx; ++i) {
    for (int s = -2; s <= 2; ++s) {
      int k = i + s;  // zero-based interior index; -1 and nx are the walls
      double sign = 1.0;
      if (k == -1 || k == nx) continue;
      if (k < -1) {
        k = -2 - k;
        sign = -1.0;
      } else if (k > nx) {
        k = 2 * nx - k;
        sign = -1.0;
      }
      d(i, k) += sign * w[s + 2] / (12.0 * h2);
    }
  }
  return d;
}

TorusProblem klein_gordon_problem(const KleinGordonParams& p) {
  if (p.nx < 2) throw InvalidArgument("Klein-Gordon needs nx >= 2");
  if (!(p.gamma > 0.0)) throw InvalidArgument("Klein-Gordon damping must be positive");
  if (!(p.length > 0.0)) throw InvalidArgument("Klein-Gordon domain length must be positive");
  const int nx = p.nx;
  const Eigen::MatrixXd dxx = kg_second_difference(p);
  Eigen::VectorXd profile(nx);
  for (int i = 0; i < nx; ++i) profile[i] = p.g * std::sin(p.node_x(i));

  TorusProblem problem;
  problem.label = "kg";
  problem.state_dim = 2 * nx;
  problem.torus_dim = 2;
  problem.rhs = [p, nx, dxx, profile](const Eigen::VectorXd& s, std::span<const double> th) {
    const auto q = s.head(nx);
    const auto v = s.tail(nx);
    Eigen::VectorXd f(2 * nx);
    f.head(nx) = v;
    f.tail(nx) = dxx * q - q - p.epsilon * q.cwiseProduct(q).cwiseProduct(q) - p.gamma * v +
                 (std::cos(th[0]) + std::cos(th[1])) * profile;
    return f;
  };
  problem.rhs_jacobian = [p, nx, dxx](const Eigen::VectorXd& s, std::span<const double>) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * nx, 2 * nx);
    j.topRightCorner(nx, nx).setIdentity();
    j.bottomLeftCorner(nx, nx) = dxx;
    for (int i = 0; i < nx; ++i) {
      j(nx + i, i) -= 1.0 + 3.0 * p.epsilon * s[i] * s[i];
      j(nx + i, nx + i) = -p.gamma;
    }
    return j;
  };
  return problem;
}

std::vector<int> kg_probe_nodes(const KleinGordonParams& p, std::span<const double> positions) {
  std::vector<int> nodes;
  nodes.reserve(positions.size());
  for (double x : positions) {
    const int i = static_cast<int>(std::lround(x / p.spacing())) - 1;
    nodes.push_back(std::clamp(i, 0, p.nx - 1));
  }
  return nodes;
}

TorusProblem three_tone_linear_problem(std::array<double, 3> omega) {
  for (double w : omega) {
    if (!(w > 0.0)) throw InvalidArgument("three-tone frequencies must be positive");
  }
  TorusProblem problem;
  problem.label = "three_tone";
  problem.state_dim = 1;
  problem.torus_dim = 3;
  problem.rhs = [](const Eigen::VectorXd&, std::span<const double> th) {
    return Eigen::VectorXd::Constant(1, std::sin(th[0]) + std::cos(th[1]) + std::sin(th[2]));
  };
  problem.rhs_jacobian = [](const Eigen::VectorXd&, std::span<const double>) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  problem.anchor = Anchor{{0, 0, 0}, Eigen::VectorXd::Zero(1), {0}};
  return problem;
}

double three_tone_torus(std::span<const double> phases, std::array<double, 3> omega) {
  // The constant makes the value at the anchor node vanish.
  const double c = 1.0 / omega[0] + 1.0 / omega[2];
  return c - std::cos(phases[0]) / omega[0] + std::sin(phases[1]) / omega[1] - std::cos(phases[2]) / omega[2];
}

namespace {

double get(const ParameterMap& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw InvalidArgument("missing parameter '" + key + "'");
  return it->second;
}

int get_int(const ParameterMap& m, const std::string& key) {
  const double v = get(m, key);
  if (v != std::floor(v)) throw InvalidArgument("parameter '" + key + "' must be an integer");
  return static_cast<int>(v);
}

ParameterMap linear_defaults() { return {{"omega0", 1.0}, {"omegaf", std::numbers::sqrt2}}; }

ParameterMap duffing_defaults() {
  const DuffingParams d;
  return {{"delta", d.delta}, {"beta", d.beta},     {"alpha", d.alpha},  {"f1", d.f1},
          {"f2", d.f2},       {"omega1", d.omega1}, {"omega2", d.omega2}};
}

ParameterMap to_map(const DuffingParams& d) {
  return {{"delta", d.delta}, {"beta", d.beta},     {"alpha", d.alpha},  {"f1", d.f1},
          {"f2", d.f2},       {"omega1", d.omega1}, {"omega2", d.omega2}};
}

ParameterMap kg_defaults() {
  const KleinGordonParams k;
  return {{"gamma", k.gamma},   {"epsilon", k.epsilon}, {"g", k.g},
          {"omega1", k.omega1}, {"omega2", k.omega2},   {"nx", static_cast<double>(k.nx)},
          {"length", k.length}, {"fd_order", static_cast<double>(k.fd_order)}};
}

ParameterMap three_tone_defaults() {
  return {{"omega1", 1.0}, {"omega2", std::numbers::sqrt2}, {"omega3", std::sqrt(3.0)}};
}

}  // namespace

LinearOscillatorParams linear_params_from(const ParameterMap& m) { return {get(m, "omega0"), get(m, "omegaf")}; }

DuffingParams duffing_params_from(const ParameterMap& m) {
  return {get(m, "delta"), get(m, "beta"), get(m, "alpha"), get(m, "f1"),
          get(m, "f2"),    get(m, "omega1"), get(m, "omega2")};
}

KleinGordonParams kg_params_from(const ParameterMap& m) {
  KleinGordonParams k;
  k.gamma = get(m, "gamma");
  k.epsilon = get(m, "epsilon");
  k.g = get(m, "g");
  k.omega1 = get(m, "omega1");
  k.omega2 = get(m, "omega2");
  k.nx = get_int(m, "nx");
  k.length = get(m, "length");
  k.fd_order = get_int(m, "fd_order");
  return k;
}

ParameterMap ProblemFamily::resolve(const ParameterMap& overrides) const {
  ParameterMap out = defaults;
  for (const auto& [key, value] : overrides) {
    if (!defaults.contains(key)) throw InvalidArgument("problem '" + name + "' has no parameter '" + key + "'");
    out[key] = value;
  }
  return out;
}

std::vector<std::string> problem_names() { return {"linear", "duffing", "kg", "three_tone"}; }

ProblemFamily problem_family(const std::string& name) {
  ProblemFamily fam;
  fam.name = name;
  auto single_stage = [](const ParameterMap& m) { return HomotopySchedule{{m}}; };

  if (name == "linear") {
    fam.defaults = linear_defaults();
    fam.frequency_keys = {"omega0", "omegaf"};
    fam.study = {3, 50.0, 0.0, 10000};
    fam.build = [](const ParameterMap& m) {
      return linear_oscillator_problem(linear_params_from(m));
    };
    fam.frequencies = [](const ParameterMap& m) { return std::vector<double>{get(m, "omega0"), get(m, "omegaf")}; };
    fam.standard_schedule = single_stage;
    fam.initial_state = [](const ParameterMap&) { return Eigen::VectorXd::Zero(1).eval(); };
    fam.output_components = [](const ParameterMap&) { return std::vector<int>{0}; };
  } else if (name == "duffing") {
    fam.defaults = duffing_defaults();
    fam.frequency_keys = {"omega1", "omega2"};
    fam.study = {3, 220.0, 55.0, 15000};
    fam.build = [](const ParameterMap& m) { return duffing_problem(duffing_params_from(m)); };
    fam.frequencies = [](const ParameterMap& m) { return std::vector<double>{get(m, "omega1"), get(m, "omega2")}; };
    fam.standard_schedule = [](const ParameterMap& m) {
      const DuffingParams target = duffing_params_from(m);
      return HomotopySchedule{{to_map(duffing_weak_point(target)), m}};
    };
    fam.initial_state = [](const ParameterMap&) { return Eigen::VectorXd::Zero(2).eval(); };
    fam.output_components = [](const ParameterMap&) { return std::vector<int>{0}; };
  } else if (name == "kg") {
    fam.defaults = kg_defaults();
    fam.frequency_keys = {"omega1", "omega2"};
    fam.study = {5, 200.0, 100.0, 20000};
    fam.build = [](const ParameterMap& m) { return klein_gordon_problem(kg_params_from(m)); };
    fam.frequencies = [](const ParameterMap& m) { return std::vector<double>{get(m, "omega1"), get(m, "omega2")}; };
    fam.standard_schedule = single_stage;
    fam.initial_state = [](const ParameterMap& m) {
      return Eigen::VectorXd::Zero(2 * get_int(m, "nx")).eval();
    };
    fam.output_components = [](const ParameterMap& m) { return kg_probe_nodes(kg_params_from(m), kKleinGordonProbes); };
  } else if (name == "three_tone") {
    fam.defaults = three_tone_defaults();
    fam.frequency_keys = {"omega1", "omega2", "omega3"};
    fam.study = {3, 50.0, 0.0, 10000};
    fam.build = [](const ParameterMap& m) {
      return three_tone_linear_problem({get(m, "omega1"), get(m, "omega2"), get(m, "omega3")});
    };
    fam.frequencies = [](const ParameterMap& m) {
      return std::vector<double>{get(m, "omega1"), get(m, "omega2"), get(m, "omega3")};
    };
    fam.standard_schedule = single_stage;
    fam.initial_state = [](const ParameterMap&) { return Eigen::VectorXd::Zero(1).eval(); };
    fam.output_components = [](const ParameterMap&) { return std::vector<int>{0}; };
  } else {
    throw InvalidArgument("unknown problem '" + name + "' (expected linear, duffing, kg or three_tone)");
  }
  fam.build = [raw = std::move(fam.build), resolved = fam](const ParameterMap& m) {
    return raw(resolved.resolve(m));
  };
  return fam;
}

}  // namespace ttsm

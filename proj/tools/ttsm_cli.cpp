#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ttsm/config.hpp"
#include "ttsm/error.hpp"
#include "ttsm/io.hpp"
#include "ttsm/problems.hpp"
#include "ttsm/reference.hpp"
#include "ttsm/studies.hpp"

namespace fs = std::filesystem;
using namespace ttsm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNotConverged = 2;

// Flag values as given; applied on top of the config file in a fixed order.
struct Flags {
  std::string config_file;
  std::optional<std::string> problem;
  std::vector<std::string> omega;
  std::vector<std::string> grid;
  std::vector<std::string> params;
  std::optional<std::string> linear_solver;
  std::optional<std::string> tol;
  std::optional<std::string> max_iters;
  std::optional<std::string> gmres_restart;
  std::optional<std::string> out;
  std::optional<std::string> seed;
  std::optional<std::string> jobs;
  std::optional<std::string> omega0;
  std::optional<std::string> omegaf;
  std::optional<std::string> max_denominator;
  std::vector<std::string> sweep_grids;
  std::optional<std::string> reference_grid;
  std::vector<std::string> window;
  std::optional<std::string> cut;
  std::optional<std::string> t_end;
  std::optional<std::string> steps;
  std::optional<std::string> samples;
  std::optional<std::string> threshold;
};

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
  return s;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "key = value config file");
  cmd->add_option("--problem", f.problem, "linear | duffing | kg | three_tone");
  cmd->add_option("--omega", f.omega, "frequency expression, one per torus axis (repeatable)");
  cmd->add_option("--grid", f.grid, "collocation counts per axis (odd)")->expected(1, -1);
  cmd->add_option("--param", f.params, "problem parameter override name=expr (repeatable)");
  cmd->add_option("--linear-solver", f.linear_solver, "auto | gmres | dense_direct");
  cmd->add_option("--tol", f.tol, "Newton residual tolerance");
  cmd->add_option("--max-iters", f.max_iters, "Newton iteration limit");
  cmd->add_option("--gmres-restart", f.gmres_restart, "GMRES restart length");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--jobs", f.jobs, "concurrent solves in a sweep");
}

void add_time(CLI::App* cmd, Flags& f) {
  cmd->add_option("--t-end", f.t_end, "record length");
  cmd->add_option("--cut", f.cut, "transient cut time");
  cmd->add_option("--steps", f.steps, "RK4 steps over [0, t-end]");
  cmd->add_option("--samples", f.samples, "reconstruction samples");
}

RunConfig build_config(Study study, const Flags& f) {
  RunConfig c;
  if (!f.config_file.empty()) apply_config_file(c, f.config_file);
  c.study = study;
  auto set = [&c](const char* key, const std::optional<std::string>& v) {
    if (v) apply_setting(c, key, *v);
  };
  set("problem", f.problem);
  if (!f.omega.empty()) apply_setting(c, "omega", join(f.omega));
  if (!f.grid.empty()) apply_setting(c, "grid", join(f.grid));
  for (const auto& p : f.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--param expects name=value, got '" + p + "'");
    apply_setting(c, "param." + p.substr(0, eq), p.substr(eq + 1));
  }
  set("linear_solver", f.linear_solver);
  set("residual_tol", f.tol);
  set("max_newton_iters", f.max_iters);
  set("gmres_restart", f.gmres_restart);
  set("output_dir", f.out);
  set("seed", f.seed);
  set("jobs", f.jobs);
  set("omega0", f.omega0);
  set("omegaf", f.omegaf);
  set("max_denominator", f.max_denominator);
  if (!f.sweep_grids.empty()) apply_setting(c, "sweep_grids", join(f.sweep_grids));
  set("reference_grid", f.reference_grid);
  if (!f.window.empty()) apply_setting(c, "window", join(f.window));
  set("cut", f.cut);
  set("t_end", f.t_end);
  set("rk4_steps", f.steps);
  set("time_samples", f.samples);
  set("peak_threshold", f.threshold);
  c.validate();
  return c;
}

struct Context {
  RunConfig config;
  OutputMeta meta;
  fs::path dir;

  template <typename Writer>
  void csv(const std::string& name, Writer&& write) const {
    std::ostringstream s;
    write(s);
    write_text_file(dir / name, s.str());
  }
  void json(const std::string& name, const nlohmann::json& j) const { write_text_file(dir / name, j.dump(2) + "\n"); }
};

struct Problem {
  ProblemFamily family;
  ParameterMap params;
  AngularGrid grid;
};

Problem resolve_problem(const RunConfig& c) {
  ProblemFamily family = problem_family(c.problem);
  ParameterMap params = c.resolved_params(family);
  const auto freqs = family.frequencies(params);
  AngularGrid grid = make_grid(freqs, c.grid_counts(freqs.size(), family.study.grid));
  return {std::move(family), std::move(params), std::move(grid)};
}

SolveReport solve_problem(const Problem& p, const NewtonConfig& config) {
  return homotopy_solve(p.family.build, p.family.standard_schedule(p.params), p.grid, config);
}

nlohmann::json peaks_json(const std::vector<Peak>& peaks) {
  nlohmann::json out = nlohmann::json::array();
  for (const Peak& pk : peaks) out.push_back({{"freq", pk.frequency}, {"amplitude", pk.amplitude}});
  return out;
}

int cmd_solve(const Context& ctx) {
  const Problem p = resolve_problem(ctx.config);
  const SolveReport report = solve_problem(p, ctx.config.newton);
  const double t_end = ctx.config.t_end.value_or(p.family.study.t_end);
  ctx.csv("field.csv", [&](std::ostream& o) { write_field_csv(o, report.solution, ctx.meta); });
  nlohmann::json j = report_json(report, ctx.meta);
  j["problem"] = p.family.name;
  j["params"] = p.params;
  ctx.json("report.json", j);
  if (report.converged) {
    const auto times = uniform_times(0.0, t_end, ctx.config.time_samples);
    const TimeSeries series = torus_to_time(report.solution, times);
    ctx.csv("series.csv", [&](std::ostream& o) { write_series_csv(o, series, ctx.meta); });
  }
  std::cout << p.family.name << " on " << report.solution.grid().num_nodes() << " nodes: "
            << (report.converged ? "converged" : "not converged") << ", residual " << report.final_residual_norm
            << " after " << report.newton_iterations << " Newton iterations\n";
  return report.converged ? kExitOk : kExitNotConverged;
}

int cmd_converge(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const ProblemFamily family = problem_family(c.problem);
  const ParameterMap params = c.resolved_params(family);
  try {
    const ConvergenceTable table = convergence_sweep(family, params, c.sweep_grids, c.reference_grid, c.newton, c.jobs);
    ctx.csv("convergence.csv", [&](std::ostream& o) { write_convergence_csv(o, table, ctx.meta); });
    nlohmann::json j = convergence_json(table, ctx.meta);
    j["problem"] = family.name;
    j["converged"] = true;
    ctx.json("convergence.json", j);
    for (const auto& r : table.rows) std::cout << r.grid_size << "\t" << r.error << "\n";
    if (table.exact) {
      std::cout << "exact: every error below 1e-11\n";
    } else {
      std::cout << "fitted rate " << table.fitted_rate << " per grid point\n";
    }
    return kExitOk;
  } catch (const SolveError& e) {
    nlohmann::json j{{"schema_version", ctx.meta.schema_version}, {"config_hash", ctx.meta.config_hash},
                     {"problem", family.name}, {"converged", false}, {"message", e.what()}};
    ctx.json("convergence.json", j);
    std::cerr << e.what() << "\n";
    return kExitNotConverged;
  }
}

int cmd_sfhb(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const SfhbPlan plan = sfhb_plan(c.omega0, c.omegaf, c.max_denominator);
  const SfhbSurrogateResult res = sfhb_surrogate_solve(plan, plan.dofs);
  const int ttsm_dofs = 9;  // 3 x 3 torus grid, one state
  nlohmann::json j{{"schema_version", ctx.meta.schema_version},
                   {"config_hash", ctx.meta.config_hash},
                   {"omega0", plan.omega0},
                   {"omegaf", plan.omegaf},
                   {"n1", plan.n1},
                   {"n2", plan.n2},
                   {"omega_base", plan.omega_base},
                   {"n_h", plan.n_h},
                   {"dofs", plan.dofs},
                   {"pseudo_period", plan.pseudo_period},
                   {"approximation_error", plan.approximation_error},
                   {"ttsm_dofs", ttsm_dofs},
                   {"ratio", static_cast<double>(plan.dofs) / ttsm_dofs},
                   {"surrogate_converged", res.report.converged},
                   {"surrogate_residual", res.report.final_residual_norm},
                   {"surrogate_error", res.surrogate_error},
                   {"true_deviation", res.true_deviation},
                   {"deviation_bound", res.deviation_bound}};
  ctx.json("sfhb.json", j);
  ctx.csv("sfhb_series.csv", [&](std::ostream& o) { write_series_csv(o, res.series, ctx.meta); });
  std::cout << "n1 " << plan.n1 << ", n2 " << plan.n2 << ", base " << plan.omega_base << ", dofs " << plan.dofs
            << " vs " << ttsm_dofs << " (ratio " << static_cast<double>(plan.dofs) / ttsm_dofs << ")\n";
  return res.report.converged ? kExitOk : kExitNotConverged;
}

int cmd_compare(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Problem p = resolve_problem(c);
  const SolveReport report = solve_problem(p, c.newton);
  if (!report.converged) {
    ctx.json("report.json", report_json(report, ctx.meta));
    std::cerr << "torus solve did not converge: " << report.message << "\n";
    return kExitNotConverged;
  }
  const double t_end = c.t_end.value_or(p.family.study.t_end);
  const double cut = c.transient_cut.value_or(p.family.study.transient_cut);
  const int steps = c.rk4_steps.value_or(p.family.study.rk4_steps);
  const AttractorComparison cmp = attractor_comparison(p.family, p.params, report.solution, t_end, cut, steps,
                                                       p.family.output_components(p.params), c.peak_threshold);
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& cc : cmp.components) {
    comps.push_back({{"component", cc.component},
                     {"pre_deviation", cc.pre_deviation},
                     {"post_deviation", cc.post_deviation},
                     {"matched_peaks", cc.matched},
                     {"torus_peaks", peaks_json(cc.torus_peaks)},
                     {"rk4_peaks", peaks_json(cc.rk4_peaks)}});
  }
  nlohmann::json j{{"schema_version", ctx.meta.schema_version},
                   {"config_hash", ctx.meta.config_hash},
                   {"problem", p.family.name},
                   {"grid", p.grid.counts()},
                   {"t_end", t_end},
                   {"cut", cut},
                   {"rk4_steps", steps},
                   {"resolution", cmp.resolution},
                   {"pre_deviation", cmp.pre_deviation},
                   {"post_deviation", cmp.post_deviation},
                   {"components", comps}};
  ctx.json("compare.json", j);
  ctx.csv("rk4.csv", [&](std::ostream& o) { write_series_csv(o, cmp.rk4, ctx.meta); });
  ctx.csv("torus.csv", [&](std::ostream& o) { write_series_csv(o, cmp.torus, ctx.meta); });
  for (const auto& cc : cmp.components) {
    std::cout << "q_" << cc.component << ": post-transient deviation " << cc.post_deviation << ", "
              << cc.matched.size() << " of " << cc.torus_peaks.size() << " peaks matched\n";
  }
  return kExitOk;
}

int cmd_spectrum(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Problem p = resolve_problem(c);
  const SolveReport report = solve_problem(p, c.newton);
  if (!report.converged) {
    ctx.json("report.json", report_json(report, ctx.meta));
    std::cerr << "torus solve did not converge: " << report.message << "\n";
    return kExitNotConverged;
  }
  const double t_end = c.t_end.value_or(p.family.study.t_end);
  const auto window = c.window.value_or(std::make_pair(c.transient_cut.value_or(p.family.study.transient_cut), t_end));
  const TimeSeries series = torus_to_time(report.solution, uniform_times(window.first, window.second, c.time_samples));

  std::vector<std::pair<int, std::vector<Peak>>> all_peaks;
  nlohmann::json comps = nlohmann::json::array();
  double resolution = 0.0;
  for (int comp : p.family.output_components(p.params)) {
    const Spectrum s = compute_spectrum(series, comp, window.first, window.second);
    resolution = s.resolution;
    auto peaks = find_peaks(s, c.peak_threshold);
    ctx.csv("spectrum_q" + std::to_string(comp) + ".csv", [&](std::ostream& o) { write_spectrum_csv(o, s, ctx.meta); });
    comps.push_back({{"component", comp}, {"peaks", peaks_json(peaks)}});
    for (const Peak& pk : peaks) std::cout << "q_" << comp << " peak at " << pk.frequency << " amplitude " << pk.amplitude << "\n";
    all_peaks.emplace_back(comp, std::move(peaks));
  }
  ctx.csv("peaks.csv", [&](std::ostream& o) { write_peaks_csv(o, all_peaks, ctx.meta); });
  nlohmann::json j{{"schema_version", ctx.meta.schema_version},
                   {"config_hash", ctx.meta.config_hash},
                   {"problem", p.family.name},
                   {"window", {window.first, window.second}},
                   {"samples", c.time_samples},
                   {"resolution", resolution},
                   {"components", comps}};
  ctx.json("spectrum.json", j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-periodic solutions by time-spectral collocation on the torus"};
  app.require_subcommand(1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "solve one torus problem");
  add_common(solve, f);
  add_time(solve, f);

  auto* converge = app.add_subcommand("converge", "grid-convergence sweep against a fine reference");
  add_common(converge, f);
  converge->add_option("--sweep-grids", f.sweep_grids, "odd per-axis counts to sweep")->expected(1, -1);
  converge->add_option("--reference-grid", f.reference_grid, "reference per-axis count");

  auto* sfhb = app.add_subcommand("sfhb", "supplemental-frequency harmonic balance DOF plan");
  add_common(sfhb, f);
  sfhb->add_option("--omega0", f.omega0, "natural frequency expression");
  sfhb->add_option("--omegaf", f.omegaf, "forcing frequency expression");
  sfhb->add_option("--max-denominator", f.max_denominator, "continued-fraction denominator cap");

  auto* compare = app.add_subcommand("compare", "torus reconstruction against RK4");
  add_common(compare, f);
  add_time(compare, f);
  compare->add_option("--threshold", f.threshold, "relative peak threshold");

  auto* spectrum = app.add_subcommand("spectrum", "spectrum of the torus reconstruction");
  add_common(spectrum, f);
  add_time(spectrum, f);
  spectrum->add_option("--window", f.window, "time window start end")->expected(2);
  spectrum->add_option("--threshold", f.threshold, "relative peak threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Study study = Study::Solve;
  if (converge->parsed()) study = Study::Converge;
  if (sfhb->parsed()) study = Study::Sfhb;
  if (compare->parsed()) study = Study::Compare;
  if (spectrum->parsed()) study = Study::Spectrum;

  Context ctx;
  try {
    ctx.config = build_config(study, f);
    ctx.meta = {kSchemaVersion, ctx.config.hash()};
    ctx.dir = ctx.config.output_dir;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    switch (study) {
      case Study::Solve: return cmd_solve(ctx);
      case Study::Converge: return cmd_converge(ctx);
      case Study::Sfhb: return cmd_sfhb(ctx);
      case Study::Compare: return cmd_compare(ctx);
      case Study::Spectrum: return cmd_spectrum(ctx);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolveError& e) {
    std::cerr << "solve failed: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

#include "ttsm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "ttsm/error.hpp"
#include "ttsm/expression.hpp"

namespace ttsm {

std::string to_string(Study s) {
  switch (s) {
    case Study::Solve: return "solve";
    case Study::Converge: return "converge";
    case Study::Sfhb: return "sfhb";
    case Study::Compare: return "compare";
    case Study::Spectrum: return "spectrum";
  }
  return "solve";
}

Study study_from_string(const std::string& name) {
  if (name == "solve") return Study::Solve;
  if (name == "converge") return Study::Converge;
  if (name == "sfhb") return Study::Sfhb;
  if (name == "compare") return Study::Compare;
  if (name == "spectrum") return Study::Spectrum;
  throw InvalidArgument("unknown study '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

long long parse_integer(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw InvalidArgument("setting '" + key + "' expects an integer, got '" + value + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  return static_cast<int>(parse_integer(key, value));
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& tok : split_list(value)) out.push_back(parse_int(key, tok));
  if (out.empty()) throw InvalidArgument("setting '" + key + "' expects at least one integer");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key.rfind("param.", 0) == 0) {
    c.params[key.substr(6)] = evaluate_expression(value);
  } else if (key == "study") {
    c.study = study_from_string(value);
  } else if (key == "problem") {
    c.problem = value;
  } else if (key == "omega") {
    c.frequencies.clear();
    for (const auto& tok : split_list(value)) c.frequencies.push_back(evaluate_expression(tok));
  } else if (key == "grid") {
    c.grid = parse_int_list(key, value);
  } else if (key == "residual_tol") {
    c.newton.residual_tol = evaluate_expression(value);
  } else if (key == "max_newton_iters") {
    c.newton.max_newton_iters = parse_int(key, value);
  } else if (key == "linear_solver") {
    c.newton.linear_solver = linear_solver_from_string(value);
  } else if (key == "gmres_restart") {
    c.newton.gmres.restart = parse_int(key, value);
  } else if (key == "gmres_rel_tol") {
    c.newton.gmres.rel_tol = evaluate_expression(value);
  } else if (key == "gmres_max_outer") {
    c.newton.gmres.max_outer = parse_int(key, value);
  } else if (key == "max_halvings") {
    c.newton.max_halvings = parse_int(key, value);
  } else if (key == "sweep_grids") {
    c.sweep_grids = parse_int_list(key, value);
  } else if (key == "reference_grid") {
    c.reference_grid = parse_int(key, value);
  } else if (key == "omega0") {
    c.omega0 = evaluate_expression(value);
  } else if (key == "omegaf") {
    c.omegaf = evaluate_expression(value);
  } else if (key == "max_denominator") {
    c.max_denominator = parse_int(key, value);
  } else if (key == "t_end") {
    c.t_end = evaluate_expression(value);
  } else if (key == "cut" || key == "transient_cut") {
    c.transient_cut = evaluate_expression(value);
  } else if (key == "rk4_steps") {
    c.rk4_steps = parse_int(key, value);
  } else if (key == "window") {
    const auto parts = split_list(value);
    if (parts.size() != 2) throw InvalidArgument("setting 'window' expects two values");
    c.window = std::make_pair(evaluate_expression(parts[0]), evaluate_expression(parts[1]));
  } else if (key == "time_samples") {
    const long long n = parse_integer(key, value);
    if (n < 2) throw InvalidArgument("time_samples must be >= 2");
    c.time_samples = static_cast<std::size_t>(n);
  } else if (key == "peak_threshold") {
    c.peak_threshold = evaluate_expression(value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_integer(key, value));
  } else if (key == "jobs") {
    c.jobs = parse_int(key, value);
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

void apply_config_text(RunConfig& config, std::istream& in, const std::string& source_name) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(source_name + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(source_name + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  apply_config_text(config, in, path);
}

ParameterMap RunConfig::resolved_params(const ProblemFamily& family) const {
  ParameterMap overrides = params;
  if (!frequencies.empty()) {
    if (frequencies.size() != family.frequency_keys.size()) {
      throw InvalidArgument("problem '" + family.name + "' takes " + std::to_string(family.frequency_keys.size()) +
                            " frequencies, got " + std::to_string(frequencies.size()));
    }
    for (std::size_t j = 0; j < frequencies.size(); ++j) overrides[family.frequency_keys[j]] = frequencies[j];
  }
  return family.resolve(overrides);
}

std::vector<int> RunConfig::grid_counts(std::size_t dims, int fallback) const {
  if (grid.empty()) return std::vector<int>(dims, fallback);
  if (grid.size() == 1) return std::vector<int>(dims, grid.front());
  if (grid.size() != dims) {
    throw InvalidArgument("grid has " + std::to_string(grid.size()) + " counts for a " + std::to_string(dims) +
                          "-torus");
  }
  return grid;
}

void RunConfig::validate() const {
  newton.validate();
  if (jobs < 1) throw InvalidArgument("jobs must be >= 1");
  if (output_dir.empty()) throw InvalidArgument("output_dir must not be empty");
  if (!(peak_threshold > 0.0 && peak_threshold < 1.0)) throw InvalidArgument("peak_threshold must lie in (0, 1)");

  if (study == Study::Sfhb) {
    if (!(omega0 > 0.0 && omegaf > 0.0)) throw InvalidArgument("omega0 and omegaf must be positive");
    if (max_denominator < 1) throw InvalidArgument("max_denominator must be >= 1");
    return;
  }

  const ProblemFamily family = problem_family(problem);
  const ParameterMap resolved = resolved_params(family);
  const auto freqs = family.frequencies(resolved);
  // make_grid checks odd counts and positive frequencies.
  (void)make_grid(freqs, grid_counts(freqs.size(), family.study.grid));
  (void)family.build(resolved);

  if (study == Study::Converge) {
    for (int n : sweep_grids) (void)make_grid(freqs, std::vector<int>(freqs.size(), n));
    (void)make_grid(freqs, std::vector<int>(freqs.size(), reference_grid));
    if (reference_grid <= *std::max_element(sweep_grids.begin(), sweep_grids.end())) {
      throw InvalidArgument("reference_grid must exceed every sweep grid");
    }
  }
  const double end = t_end.value_or(family.study.t_end);
  if (!(end > 0.0)) throw InvalidArgument("t_end must be positive");
  if (transient_cut && !(*transient_cut >= 0.0 && *transient_cut < end)) {
    throw InvalidArgument("cut must lie in [0, t_end)");
  }
  if (rk4_steps && *rk4_steps < 1) throw InvalidArgument("rk4_steps must be >= 1");
  if (window && !(window->first < window->second)) throw InvalidArgument("window must be increasing");
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["study"] = to_string(study);
  kv["problem"] = problem;
  for (const auto& [k, v] : params) kv["param." + k] = fmt(v);
  auto join_d = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fmt(x);
    return s;
  };
  auto join_i = [](const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
    return s;
  };
  kv["omega"] = join_d(frequencies);
  kv["grid"] = join_i(grid);
  kv["residual_tol"] = fmt(newton.residual_tol);
  kv["max_newton_iters"] = std::to_string(newton.max_newton_iters);
  kv["linear_solver"] = to_string(newton.linear_solver);
  kv["gmres_restart"] = std::to_string(newton.gmres.restart);
  kv["gmres_rel_tol"] = fmt(newton.gmres.rel_tol);
  kv["gmres_max_outer"] = std::to_string(newton.gmres.max_outer);
  kv["max_halvings"] = std::to_string(newton.max_halvings);
  kv["sweep_grids"] = join_i(sweep_grids);
  kv["reference_grid"] = std::to_string(reference_grid);
  kv["omega0"] = fmt(omega0);
  kv["omegaf"] = fmt(omegaf);
  kv["max_denominator"] = std::to_string(max_denominator);
  kv["t_end"] = t_end ? fmt(*t_end) : "default";
  kv["cut"] = transient_cut ? fmt(*transient_cut) : "default";
  kv["rk4_steps"] = rk4_steps ? std::to_string(*rk4_steps) : "default";
  kv["window"] = window ? fmt(window->first) + " " + fmt(window->second) : "default";
  kv["time_samples"] = std::to_string(time_samples);
  kv["peak_threshold"] = fmt(peak_threshold);
  kv["seed"] = std::to_string(seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ttsm

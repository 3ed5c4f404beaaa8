#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttsm/problems.hpp"
#include "ttsm/solver.hpp"

namespace ttsm {

enum class Study { Solve, Converge, Sfhb, Compare, Spectrum };

std::string to_string(Study s);
Study study_from_string(const std::string& name);

/// Everything a CLI run depends on. Built from a key-value config file
/// and/or command-line flags, then validated before any solve.
///
/// Config file syntax: one `key = value` per line, `#` starts a comment.
/// Problem parameters use `param.<name> = <expr>`; frequencies, grids and
/// windows are whitespace- or comma-separated lists.
struct RunConfig {
  Study study = Study::Solve;
  std::string problem = "linear";
  ParameterMap params;                 ///< overrides; values already evaluated
  std::vector<double> frequencies;     ///< overrides the problem's frequency parameters when set
  std::vector<int> grid;               ///< per-axis counts; one entry is broadcast to every axis
  NewtonConfig newton{};

  std::vector<int> sweep_grids{3, 5, 7, 9, 11, 13, 15, 17, 19};
  int reference_grid = 31;

  double omega0 = 1.0;                 ///< sfhb
  double omegaf = 0.97 + 0.03 * 1.4142135623730951;
  int max_denominator = 100;

  std::optional<double> t_end;         ///< compare / spectrum / solve time series
  std::optional<double> transient_cut;
  std::optional<int> rk4_steps;
  std::optional<std::pair<double, double>> window;
  std::size_t time_samples = 15000;
  double peak_threshold = 0.01;

  std::string output_dir = "ttsm_out";
  std::uint64_t seed = 0;
  int jobs = 1;

  /// Throws InvalidArgument on inconsistent or out-of-range settings.
  void validate() const;

  /// Canonical `key=value` lines, sorted, covering every setting that can
  /// influence output.
  [[nodiscard]] std::string canonical() const;
  /// 16 hex digits, FNV-1a of canonical().
  [[nodiscard]] std::string hash() const;

  /// Resolved problem parameters including frequency overrides.
  [[nodiscard]] ParameterMap resolved_params(const ProblemFamily& family) const;
  /// Grid counts for a torus of the given dimension.
  [[nodiscard]] std::vector<int> grid_counts(std::size_t dims, int fallback) const;
};

inline constexpr int kSchemaVersion = 1;

/// Applies one setting. Unknown keys throw InvalidArgument.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses key-value text into `config`.
void apply_config_text(RunConfig& config, std::istream& in, const std::string& source_name = "<config>");
void apply_config_file(RunConfig& config, const std::string& path);

}  // namespace ttsm

#pragma once

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ttsm/grid.hpp"
#include "ttsm/reference.hpp"
#include "ttsm/solver.hpp"
#include "ttsm/studies.hpp"

namespace ttsm {

/// Provenance stamped into every output file.
struct OutputMeta {
  int schema_version = 1;
  std::string config_hash;
};

// Every CSV row ends with schema_version and config_hash columns so that
// each file carries its provenance while staying plain header-row CSV.

/// One row per node: l_0.., theta_0.., q_0...
void write_field_csv(std::ostream& out, const TorusField& field, const OutputMeta& meta);
/// t, q_0...
void write_series_csv(std::ostream& out, const TimeSeries& series, const OutputMeta& meta);
/// freq, amplitude
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum, const OutputMeta& meta);
/// component, freq, amplitude
void write_peaks_csv(std::ostream& out, const std::vector<std::pair<int, std::vector<Peak>>>& peaks,
                     const OutputMeta& meta);

/// Reads a field written by write_field_csv; frequencies are supplied by the
/// caller since the CSV stores only angles.
TorusField read_field_csv(std::istream& in, const std::vector<double>& frequencies);

/// Deterministic solve summary (no wall time).
nlohmann::json report_json(const SolveReport& report, const OutputMeta& meta);
nlohmann::json convergence_json(const ConvergenceTable& table, const OutputMeta& meta);
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table, const OutputMeta& meta);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ttsm

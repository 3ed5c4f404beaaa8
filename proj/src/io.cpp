#include "ttsm/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ttsm/error.hpp"

namespace ttsm {

namespace {

std::string meta_cells(const OutputMeta& meta) {
  return "," + std::to_string(meta.schema_version) + "," + meta.config_hash + "\n";
}

constexpr const char* kMetaHeader = ",schema_version,config_hash\n";

nlohmann::json meta_json(const OutputMeta& meta) {
  return {{"schema_version", meta.schema_version}, {"config_hash", meta.config_hash}};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

void write_field_csv(std::ostream& out, const TorusField& field, const OutputMeta& meta) {
  const AngularGrid& g = field.grid();
  for (std::size_t j = 0; j < g.dims(); ++j) out << "l_" << j << ",";
  for (std::size_t j = 0; j < g.dims(); ++j) out << "theta_" << j << ",";
  for (int c = 0; c < field.state_dim(); ++c) out << "q_" << c << (c + 1 < field.state_dim() ? "," : kMetaHeader);
  out << std::setprecision(17);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto idx = g.multi_index(i);
    for (int l : idx) out << l << ",";
    for (std::size_t j = 0; j < g.dims(); ++j) out << g.angle(j, idx[j]) << ",";
    const auto q = field.node(i);
    for (int c = 0; c < field.state_dim(); ++c) out << q[c] << (c + 1 < field.state_dim() ? "," : "");
    out << meta_cells(meta);
  }
}

void write_series_csv(std::ostream& out, const TimeSeries& series, const OutputMeta& meta) {
  const int n = series.states.empty() ? 0 : static_cast<int>(series.states.front().size());
  out << "t";
  for (int c = 0; c < n; ++c) out << ",q_" << c;
  out << kMetaHeader << std::setprecision(17);
  const std::string tail = meta_cells(meta);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.times[i];
    for (int c = 0; c < n; ++c) out << "," << series.states[i][c];
    out << tail;
  }
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum, const OutputMeta& meta) {
  out << "freq,amplitude" << kMetaHeader << std::setprecision(17);
  const std::string tail = meta_cells(meta);
  for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k) {
    out << spectrum.frequencies[k] << "," << spectrum.amplitudes[k] << tail;
  }
}

void write_peaks_csv(std::ostream& out, const std::vector<std::pair<int, std::vector<Peak>>>& peaks,
                     const OutputMeta& meta) {
  out << "component,freq,amplitude" << kMetaHeader << std::setprecision(17);
  const std::string tail = meta_cells(meta);
  for (const auto& [c, list] : peaks) {
    for (const Peak& p : list) out << c << "," << p.frequency << "," << p.amplitude << tail;
  }
}

TorusField read_field_csv(std::istream& in, const std::vector<double>& frequencies) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    header = split_csv(line);
    break;
  }
  const std::size_t k = frequencies.size();
  if (header.size() < 2 * k + 1) throw InvalidArgument("field CSV header does not match a " + std::to_string(k) + "-torus");
  int n = 0;
  for (const auto& h : header) n += h.rfind("q_", 0) == 0 ? 1 : 0;
  if (n == 0) throw InvalidArgument("field CSV has no state columns");

  std::vector<std::vector<int>> idx;
  std::vector<std::vector<double>> vals;
  std::vector<int> counts(k, 0);
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw InvalidArgument("field CSV row has the wrong number of columns");
    std::vector<int> m(k);
    for (std::size_t j = 0; j < k; ++j) {
      m[j] = std::stoi(cells[j]);
      counts[j] = std::max(counts[j], m[j] + 1);
    }
    std::vector<double> q(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) q[static_cast<std::size_t>(c)] = std::stod(cells[2 * k + static_cast<std::size_t>(c)]);
    idx.push_back(std::move(m));
    vals.push_back(std::move(q));
  }
  TorusField field(make_grid(frequencies, counts), n);
  if (idx.size() != field.grid().num_nodes()) throw InvalidArgument("field CSV does not cover every node");
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const std::size_t node = field.grid().linear_index(idx[r]);
    for (int c = 0; c < n; ++c) field.node(node)[c] = vals[r][static_cast<std::size_t>(c)];
  }
  return field;
}

nlohmann::json report_json(const SolveReport& report, const OutputMeta& meta) {
  nlohmann::json j = meta_json(meta);
  const AngularGrid& g = report.solution.grid();
  j["frequencies"] = g.frequencies();
  j["grid"] = g.counts();
  j["state_dim"] = report.solution.state_dim();
  j["unknowns"] = report.solution.size();
  j["converged"] = report.converged;
  j["final_residual_norm"] = report.final_residual_norm;
  j["newton_iterations"] = report.newton_iterations;
  j["residual_history"] = report.residual_history;
  j["step_lengths"] = report.step_lengths;
  j["linear_solver"] = to_string(report.linear_solver);
  nlohmann::json gm = nlohmann::json::array();
  for (const auto& s : report.gmres_stats) {
    gm.push_back({{"outer", s.outer_iterations}, {"inner", s.inner_iterations}, {"rel_residual", s.rel_residual}});
  }
  j["gmres"] = gm;
  j["message"] = report.message;
  if (report.failed_stage) j["failed_stage"] = *report.failed_stage;
  return j;
}

nlohmann::json convergence_json(const ConvergenceTable& table, const OutputMeta& meta) {
  nlohmann::json j = meta_json(meta);
  j["reference_grid"] = table.reference_size;
  j["reference_residual"] = table.reference_residual;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"grid", r.grid_size},
                    {"error", r.error},
                    {"residual", r.residual},
                    {"newton_iterations", r.newton_iterations}});
  }
  j["rows"] = rows;
  j["exact"] = table.exact;
  if (!table.exact && !table.fit_window.empty()) {
    j["fitted_rate"] = table.fitted_rate;
    j["fit_window"] = table.fit_window;
    j["wide_fitted_rate"] = table.wide_fitted_rate;
  }
  return j;
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table, const OutputMeta& meta) {
  out << "grid,error,residual,newton_iterations" << kMetaHeader << std::setprecision(17);
  const std::string tail = meta_cells(meta);
  for (const auto& r : table.rows) {
    out << r.grid_size << "," << r.error << "," << r.residual << "," << r.newton_iterations << tail;
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InvalidArgument("failed writing '" + path.string() + "'");
}

}  // namespace ttsm

#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfheat/config.hpp"
#include "halfheat/solver.hpp"

namespace halfheat {

/// Floats are printed with 17 significant digits so CSV round-trips
/// are bit exact.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    columns_ = header.size();
    write_row_strings(header);
  }

  void write_row(const std::vector<double>& row) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_double(v));
    write_row_strings(cells);
  }

  void write_row_strings(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

/// Writes the run manifest: the verbatim config (so it can be parsed
/// back as one) followed by a [manifest] section the parser skips.
inline void write_manifest(const std::string& path, const std::string& config_text,
                           const std::string& command, double wall_seconds,
                           const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open manifest file: " + path);
  out << config_text;
  if (!config_text.empty() && config_text.back() != '\n') out << '\n';
  out << "\n[manifest]\n";
  out << "version = " << kVersion << '\n';
  out << "command = " << command << '\n';
  out << "config_hash = " << config_hash(config_text) << '\n';
  out << "wall_seconds = " << format_double(wall_seconds) << '\n';
  for (const auto& [k, v] : extra) out << k << " = " << v << '\n';
}

inline std::string ensure_output_dir(const ExperimentConfig& ec) {
  std::string dir = ec.output_dir;
  if (const char* env = std::getenv("HALFHEAT_OUTPUT_DIR")) dir = env;
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace halfheat

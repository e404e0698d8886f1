// Bit-stable data output for the command-line front end: CSV tables with a
// fixed "%.12g" number format so identical runs produce identical bytes,
// and a JSON run manifest with stable key order.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace eitloc {

inline constexpr char code_version[] = "0.1.0";

// "%.12g"; the one number format used in every CSV cell.
std::string csv_number(double value);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  explicit CsvTable(std::vector<std::string> column_names)
      : columns(std::move(column_names)) {}

  // Throws std::invalid_argument on a cell-count mismatch.
  void add_row(std::vector<std::string> cells);

  // Header line plus one line per row, comma-delimited, '\n' endings.
  std::string render() const;
};

// Sidecar emitted with every run. Wall time and worker count describe the
// particular run; everything else is a pure function of config and code
// version, and the data files themselves are byte-identical for any worker
// count.
struct RunManifest {
  std::string subcommand;
  std::string config_hash;
  int jobs = 1;
  double wall_time_seconds = 0.0;
  std::vector<std::string> files;  // data files written, relative to --out
  std::size_t rows = 0;            // data rows across all files
  std::vector<long> step_counts;   // integrator steps per output row
  std::vector<std::string> warnings;
  nlohmann::ordered_json results;  // subcommand-specific scalars

  nlohmann::ordered_json to_json() const;
  std::string render() const;  // to_json().dump(2) + '\n'
};

// Writes content to path, creating parent directories as needed. Throws
// std::runtime_error when the file cannot be written.
void write_file(const std::string& path, std::string_view content);

}  // namespace eitloc

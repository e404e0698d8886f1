#include "eitloc/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace eitloc {

std::string csv_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) +
                                " cells, table has " +
                                std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(cells));
}

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["code_version"] = code_version;
  j["config_hash"] = config_hash;
  j["jobs"] = jobs;
  j["wall_time_seconds"] = wall_time_seconds;
  j["files"] = files;
  j["rows"] = rows;
  j["step_counts"] = step_counts;
  j["warnings"] = warnings;
  j["results"] = results.is_null() ? nlohmann::ordered_json::object() : results;
  return j;
}

std::string RunManifest::render() const { return to_json().dump(2) + "\n"; }

void write_file(const std::string& path, std::string_view content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path())
    std::filesystem::create_directories(target.parent_path());
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
}

}  // namespace eitloc

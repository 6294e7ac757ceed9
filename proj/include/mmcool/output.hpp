#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mmcool::cli {

// Numeric table written as CSV; column names carry their units, e.g.
// "p0[hbar k0]". Values are printed with 17 significant digits so that
// identical runs give identical bytes.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::string render() const;
  void write(const std::string& path) const;
};

// FNV-1a 64-bit of a string, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

struct Manifest {
  std::string command;
  nlohmann::json body = nlohmann::json::object();
  std::vector<std::string> files;

  void write(const std::string& path) const;
};

// Creates the directory (and parents) if needed; throws when not writable.
void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace mmcool::cli

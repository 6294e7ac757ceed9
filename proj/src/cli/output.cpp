#include "mmcool/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mmcool::cli {

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("CSV row has " + std::to_string(row.size()) + " values for " +
                           std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << render();
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Manifest::write(const std::string& path) const {
  nlohmann::json j = body;
  j["command"] = command;
  j["files"] = files;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("output directory '" + dir + "' is not writable");
  }
  const auto probe = std::filesystem::path(dir) / ".mmcool_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw std::runtime_error("output directory '" + dir + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace mmcool::cli

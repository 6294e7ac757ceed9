#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmcool {

// Flat key = value parameter set. '#' starts a comment; blank lines are
// ignored. Keys are looked up by consumers, which mark them as used so that
// typos can be reported.
class Config {
 public:
  Config() = default;

  static Config parse(std::string_view text, std::string_view origin = "<string>");
  static Config load(const std::string& path);

  // Applies a single "key=value" override.
  void set(std::string_view assignment);
  void set(const std::string& key, const std::string& value);
  void merge(const Config& other);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<double> number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;

  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

}  // namespace mmcool

#pragma once

#include <map>
#include <string>
#include <vector>

namespace graspguard {

/// One value of the scenario text format: a TOML subset with [tables],
/// key = value pairs, strings, numbers, booleans, inf/nan and flat arrays.
struct ConfigValue {
  enum class Kind { boolean, number, string, array };
  Kind kind = Kind::number;
  bool boolean = false;
  double number = 0.0;
  std::string string;
  std::string raw;  // number token as written, underscores removed
  std::vector<ConfigValue> items;
  int line = 0;

  std::string kind_name() const;
};

class ConfigDocument {
 public:
  /// Throws ConfigError with "source:line: message" on malformed input.
  static ConfigDocument parse(const std::string& text, const std::string& source = "<string>");
  static ConfigDocument load(const std::string& path);

  /// Entries keyed by their full dotted path, e.g. "plant.stiffness".
  const std::map<std::string, ConfigValue>& entries() const { return entries_; }
  const std::string& source() const { return source_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const ConfigValue& at(const std::string& key) const;
  std::string where(const std::string& key) const;

 private:
  std::map<std::string, ConfigValue> entries_;
  std::string source_;
};

}  // namespace graspguard

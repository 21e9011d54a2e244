#pragma once

#include "pim/core.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pim {

// line 0 means the value came from a command-line flag
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, std::string key, int line = 0);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

struct ConfigValue;
using ConfigArray = std::vector<ConfigValue>;
using ConfigTable = std::vector<std::pair<std::string, ConfigValue>>;

struct ConfigValue {
  std::variant<double, std::string, bool, ConfigArray, ConfigTable> v;
  int line = 0;

  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_array() const { return std::holds_alternative<ConfigArray>(v); }
  bool is_table() const { return std::holds_alternative<ConfigTable>(v); }
};

// Flat TOML-like text: [section] headers, key = value lines, '#' comments.
// Values: numbers, "strings", true/false, [arrays], {inline = tables}.
class Config {
 public:
  static Config parse(std::istream& is);
  static Config load(const std::string& path);

  // "section.key"
  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const ConfigValue& at(const std::string& key) const;
  void set(const std::string& key, ConfigValue v) { entries_[key] = std::move(v); }
  void erase(const std::string& key) { entries_.erase(key); }
  // parses a bare value as it would appear after '='; line 0
  static ConfigValue parse_value(const std::string& text, const std::string& key);

  std::string string(const std::string& key) const;
  std::optional<std::string> string_or(const std::string& key) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  // scalar or array of numbers
  std::vector<double> numbers(const std::string& key) const;
  // inline table; missing key gives an empty table
  ConfigTable table(const std::string& key) const;
  int line(const std::string& key) const;

  std::vector<std::string> keys() const;

 private:
  std::map<std::string, ConfigValue> entries_;
};

const ConfigValue* find(const ConfigTable& t, const std::string& name);
double table_number(const ConfigTable& t, const std::string& name, const std::string& owner, int line);
double table_number(const ConfigTable& t, const std::string& name, double fallback, const std::string& owner);
std::vector<double> value_numbers(const ConfigValue& v, const std::string& key);

}  // namespace pim

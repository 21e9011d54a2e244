#include "pim/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>

namespace pim {

namespace {

std::string where(const std::string& key, int line) {
  std::string s = line > 0 ? "line " + std::to_string(line) + ": " : "";
  return s + "key '" + key + "': ";
}

class ValueParser {
 public:
  ValueParser(std::string_view s, std::string key, int line) : s_(s), key_(std::move(key)), line_(line) {}

  ConfigValue parse_all() {
    ConfigValue v = value();
    skip();
    if (pos_ != s_.size()) fail("trailing characters '" + std::string(s_.substr(pos_)) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, key_, line_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ConfigValue make(decltype(ConfigValue::v) x) const { return ConfigValue{std::move(x), line_}; }

  ConfigValue value() {
    skip();
    if (pos_ >= s_.size()) fail("missing value");
    char c = s_[pos_];
    if (c == '"') return make(quoted());
    if (c == '[') return make(array());
    if (c == '{') return make(table());
    std::string w = word();
    if (w == "true") return make(true);
    if (w == "false") return make(false);
    double x = 0.0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
    if (ec == std::errc() && p == w.data() + w.size()) return make(x);
    if (w == "inf" || w == "+inf") return make(HUGE_VAL);
    if (w == "-inf") return make(-HUGE_VAL);
    // bare words read as strings so flags can skip the quotes
    if (w.empty()) fail("unexpected '" + std::string(1, c) + "'");
    return make(w);
  }

  std::string word() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::strchr(",]}=", s_[pos_]) && !std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      out += s_[pos_++];
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  ConfigArray array() {
    ++pos_;
    ConfigArray out;
    if (eat(']')) return out;
    do {
      out.push_back(value());
    } while (eat(','));
    if (!eat(']')) fail("expected ']'");
    return out;
  }

  ConfigTable table() {
    ++pos_;
    ConfigTable out;
    if (eat('}')) return out;
    do {
      skip();
      std::string k = word();
      if (k.empty()) fail("expected a name inside '{}'");
      if (!eat('=')) fail("expected '=' after '" + k + "'");
      out.emplace_back(k, value());
    } while (eat(','));
    if (!eat('}')) fail("expected '}'");
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::string key_;
  int line_;
};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// drops a trailing comment; returns bracket depth change
int strip_comment(std::string& s) {
  bool in_str = false;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (in_str) continue;
    if (c == '#') {
      s.resize(i);
      break;
    }
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
  }
  return depth;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

// dotted, e.g. variant.n16.prior
bool valid_section(const std::string& s) {
  std::size_t from = 0;
  while (true) {
    auto dot = s.find('.', from);
    if (!valid_name(s.substr(from, dot - from))) return false;
    if (dot == std::string::npos) return true;
    from = dot + 1;
  }
}

const char* kind_name(const ConfigValue& v) {
  switch (v.v.index()) {
    case 0: return "number";
    case 1: return "string";
    case 2: return "boolean";
    case 3: return "array";
    default: return "table";
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& msg, std::string key, int line)
    : Error(where(key, line) + msg), key_(std::move(key)), line_(line) {}

ConfigValue Config::parse_value(const std::string& text, const std::string& key) {
  return ValueParser(text, key, 0).parse_all();
}

Config Config::parse(std::istream& is) {
  Config cfg;
  std::string section, raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const int start = lineno;
    int depth = strip_comment(raw);
    while (depth > 0) {
      std::string more;
      if (!std::getline(is, more)) throw ConfigError("unbalanced brackets", section, start);
      ++lineno;
      depth += strip_comment(more);
      raw += " " + more;
    }
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line, start);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_section(section)) throw ConfigError("bad section name", section, start);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", trim(line), start);
    std::string k = trim(std::string_view(line).substr(0, eq));
    if (!valid_name(k)) throw ConfigError("bad key name", k, start);
    if (section.empty()) throw ConfigError("key outside any [section]", k, start);
    std::string full = section + "." + k;
    if (cfg.has(full)) throw ConfigError("duplicate key", full, start);
    cfg.entries_[full] = ValueParser(std::string_view(line).substr(eq + 1), full, start).parse_all();
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", "config");
  return parse(in);
}

const ConfigValue& Config::at(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("required key is missing", key);
  return it->second;
}

int Config::line(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

std::string Config::string(const std::string& key) const {
  const auto& v = at(key);
  if (v.is_string()) return std::get<std::string>(v.v);
  if (v.is_number()) {
    std::ostringstream os;
    os << std::get<double>(v.v);
    return os.str();
  }
  throw ConfigError(std::string("expected a string, got ") + kind_name(v), key, v.line);
}

std::optional<std::string> Config::string_or(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return string(key);
}

double Config::number(const std::string& key) const {
  const auto& v = at(key);
  if (v.is_number()) return std::get<double>(v.v);
  throw ConfigError(std::string("expected a number, got ") + kind_name(v), key, v.line);
}

double Config::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

long Config::integer(const std::string& key) const {
  double x = number(key);
  if (x != std::floor(x) || std::abs(x) > 9.0e15) throw ConfigError("expected an integer", key, line(key));
  return static_cast<long>(x);
}

long Config::integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

std::vector<double> value_numbers(const ConfigValue& v, const std::string& key) {
  if (v.is_number()) return {std::get<double>(v.v)};
  if (!v.is_array()) throw ConfigError(std::string("expected a number or array, got ") + kind_name(v), key, v.line);
  std::vector<double> out;
  for (const auto& e : std::get<ConfigArray>(v.v)) {
    if (!e.is_number()) throw ConfigError("array entries must be numbers", key, v.line);
    out.push_back(std::get<double>(e.v));
  }
  return out;
}

std::vector<double> Config::numbers(const std::string& key) const { return value_numbers(at(key), key); }

ConfigTable Config::table(const std::string& key) const {
  if (!has(key)) return {};
  const auto& v = at(key);
  if (!v.is_table()) throw ConfigError(std::string("expected {name = value, ...}, got ") + kind_name(v), key, v.line);
  return std::get<ConfigTable>(v.v);
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

const ConfigValue* find(const ConfigTable& t, const std::string& name) {
  for (const auto& [k, v] : t)
    if (k == name) return &v;
  return nullptr;
}

double table_number(const ConfigTable& t, const std::string& name, const std::string& owner, int line) {
  const auto* v = find(t, name);
  if (!v) throw ConfigError("missing '" + name + "'", owner, line);
  if (!v->is_number()) throw ConfigError("'" + name + "' must be a number", owner, v->line);
  return std::get<double>(v->v);
}

double table_number(const ConfigTable& t, const std::string& name, double fallback, const std::string& owner) {
  const auto* v = find(t, name);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError("'" + name + "' must be a number", owner, v->line);
  return std::get<double>(v->v);
}

}  // namespace pim

#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace clwr {

/// Raised for anything the user can fix in the config file or on the command
/// line; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key-value store with dotted section keys ("grid.dx"). Files use ini
/// sections and `key = value` lines; command-line overrides use the dotted
/// form directly.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Config cfg;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto fail = [&](const std::string& msg) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": " + msg);
      };
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']' || t.size() < 3) fail("malformed section header");
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty()) fail("empty section name");
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) fail("expected `key = value`");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) fail("empty key");
      if (section.empty()) fail("key outside any [section]");
      cfg.kv_[section + "." + key] = value;
    }
    return cfg;
  }

  /// Command-line override `--section.key=value` (leading dashes optional).
  void set_override(std::string arg) {
    while (!arg.empty() && arg.front() == '-') arg.erase(arg.begin());
    const auto eq = arg.find('=');
    if (eq == std::string::npos || arg.find('.') == std::string::npos || eq == 0)
      throw ConfigError("override must look like --section.key=value, got: " + arg);
    kv_[trim(arg.substr(0, eq))] = trim(arg.substr(eq + 1));
  }

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required config key: " + key);
    return it->second;
  }

  double num(const std::string& key) const { return parse_num(key, require(key)); }

  double num(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_num(key, it->second);
  }

  int integer(const std::string& key, int fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const double v = parse_num(key, it->second);
    const int n = static_cast<int>(v);
    if (static_cast<double>(n) != v) throw ConfigError("expected an integer for " + key);
    return n;
  }

  /// Numeric list; brackets and commas are decoration: `[1, 2]` == `1 2`.
  std::vector<double> list(const std::string& key) const {
    std::string raw = require(key);
    for (char& c : raw)
      if (c == '[' || c == ']' || c == ',') c = ' ';
    std::istringstream in(raw);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_num(key, tok));
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
  }

  /// Sorted view for embedding the resolved config into output headers.
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  static double parse_num(const std::string& key, const std::string& raw) {
    try {
      std::size_t used = 0;
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("not a number for " + key + ": `" + raw + "`");
    }
  }

  std::map<std::string, std::string> kv_;
};

}  // namespace clwr

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include "clwr/config.hpp"

namespace clwr {

/// Fixed 12-significant-digit formatting; all CSV output goes through here so
/// identical configs produce byte-identical files.
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Comma-separated output with `#`-prefixed header comments. Every file
/// starts with the resolved config so a run can be reproduced from its data.
class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
  }

  void comment(const std::string& line) { out_ << "# " << line << "\n"; }

  void embed_config(const Config& cfg) {
    for (const auto& [k, v] : cfg.entries()) comment(k + " = " + v);
  }

  void header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << "\n";
  }

  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    (write_cell(cells, first), ...);
    out_ << "\n";
  }

 private:
  template <typename T>
  void write_cell(const T& cell, bool& first) {
    if (!first) out_ << ",";
    first = false;
    if constexpr (std::is_same_v<T, double>)
      out_ << fmt12(cell);
    else if constexpr (std::is_integral_v<T>)
      out_ << std::to_string(cell);
    else
      out_ << cell;
  }

  std::ofstream out_;
};

}  // namespace clwr

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fiohardy/errors.hpp"

namespace fiohardy {

// Fixed, locale-independent rendering so that report files are byte-identical
// across reruns with the same inputs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("csv: cannot open '" + path + "' for writing");
  }

  void header(const std::vector<std::string>& names) { raw_row(names); }

  CsvWriter& field(const std::string& s) {
    row_.push_back(s);
    return *this;
  }
  CsvWriter& field(double v) { return field(format_double(v)); }
  CsvWriter& field(int v) { return field(std::to_string(v)); }
  CsvWriter& field(std::uint64_t v) { return field(std::to_string(v)); }

  void end_row() {
    raw_row(row_);
    row_.clear();
  }

 private:
  void raw_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::vector<std::string> row_;
};

}  // namespace fiohardy

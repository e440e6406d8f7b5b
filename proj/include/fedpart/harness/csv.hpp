#pragma once

// Plot-ready CSV: 9 significant digits, '.' decimal separator, '\n' endings.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fedpart/error.hpp"

namespace fedpart::harness {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // "-0" would break byte-level goldens
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string join_numbers(std::span<const double> values, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(sep);
    out += format_number(values[i]);
  }
  return out;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  void add_row(std::vector<std::string> row) {
    if (row.size() != header_.size())
      throw InternalError("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                          std::to_string(header_.size()));
    rows_.push_back(std::move(row));
  }

  /// Index of a named column; throws if absent.
  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == name) return i;
    throw InternalError("no CSV column named '" + name + "'");
  }

  void write(std::ostream& out) const {
    write_line(out, header_);
    for (const auto& r : rows_) write_line(out, r);
  }

  std::string str() const {
    std::ostringstream out;
    write(out);
    return out.str();
  }

 private:
  static void write_field(std::ostream& out, const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out << f;
      return;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }

  static void write_line(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      write_field(out, fields[i]);
    }
    out << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace fedpart::harness

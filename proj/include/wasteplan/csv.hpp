#pragma once

// Minimal strict CSV reading: UTF-8, comma-delimited, header row required,
// `.` decimal point. Quoting is not supported; none of the documented file
// schemas need embedded commas. Every error names the file, line, and column.

#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wasteplan/errors.hpp"

namespace wasteplan::csv {

struct Row {
  long line = 0;  // 1-based, header is line 1
  std::vector<std::string> fields;
};

inline std::vector<std::string> split_fields(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

class Reader {
public:
  Reader(const std::string& path, const std::vector<std::string>& expected_header)
      : path_(path), in_(path), n_columns_(expected_header.size()) {
    if (!in_) {
      throw data_error("cannot open file: " + path);
    }
    std::string header;
    if (!std::getline(in_, header)) {
      throw data_error(path, 1, "missing header row");
    }
    strip_cr(header);
    const std::vector<std::string> got = split_fields(header);
    if (got != expected_header) {
      std::string want;
      for (std::size_t i = 0; i < expected_header.size(); ++i) {
        if (i) want += ',';
        want += expected_header[i];
      }
      throw data_error(path, 1, "unexpected header; want `" + want + "`, got `" +
                                    header + "`");
    }
    header_ = expected_header;
  }

  const std::string& path() const { return path_; }

  /// Next data row, or nullopt at end of file. Blank lines are skipped.
  std::optional<Row> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      strip_cr(line);
      if (line.empty()) continue;
      Row row{line_no_, split_fields(line)};
      if (row.fields.size() != n_columns_) {
        throw data_error(path_, line_no_,
                         "expected " + std::to_string(n_columns_) + " fields, got " +
                             std::to_string(row.fields.size()));
      }
      return row;
    }
    return std::nullopt;
  }

  std::string field_error(const Row& row, std::size_t col, const std::string& msg) const {
    return path_ + ":" + std::to_string(row.line) + ": column `" + header_[col] +
           "`: " + msg;
  }

  double parse_double(const Row& row, std::size_t col) const {
    const std::string& s = row.fields[col];
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw data_error(field_error(row, col, "not a number: `" + s + "`"));
    }
    return value;
  }

  long parse_long(const Row& row, std::size_t col) const {
    const std::string& s = row.fields[col];
    long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw data_error(field_error(row, col, "not an integer: `" + s + "`"));
    }
    return value;
  }

private:
  static void strip_cr(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  }

  std::string path_;
  std::ifstream in_;
  std::size_t n_columns_;
  std::vector<std::string> header_;
  long line_no_ = 1;
};

}  // namespace wasteplan::csv

#pragma once

// Minimal CSV plumbing shared by the dataset loaders and the spectrum I/O.
// Numbers are written in shortest round-trip form so write -> read -> write
// is a fixed point.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "groupiv/error.hpp"

namespace groupiv::csv {

inline std::string format_number(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw IoError("failed to format number");
  return std::string(buffer, end);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

inline std::optional<std::int64_t> parse_int(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

struct Row {
  std::size_t line = 0;
  std::vector<std::string_view> cells;
};

/// Reads a headed CSV stream. Lines starting with '#' are passed to `on_comment`
/// (without the '#'), blank lines are skipped, and the first data line must equal
/// `header` after whitespace trimming.
class Reader {
 public:
  Reader(std::istream& in, std::string source, std::string_view header)
      : in_(in), source_(std::move(source)), header_(header) {}

  std::function<void(std::size_t, std::string_view)> on_comment;

  // Returns false at end of input.
  bool next(Row& row) {
    while (std::getline(in_, buffer_)) {
      ++line_;
      const std::string_view text = trim(buffer_);
      if (text.empty()) continue;
      if (text.front() == '#') {
        if (on_comment) on_comment(line_, trim(text.substr(1)));
        continue;
      }
      if (!header_seen_) {
        if (!same_header(text)) fail(line_, "expected header '" + header_ + "'");
        header_seen_ = true;
        continue;
      }
      row.line = line_;
      row.cells = split(text);
      return true;
    }
    if (!header_seen_) fail(line_ == 0 ? 1 : line_, "missing header '" + header_ + "'");
    return false;
  }

  [[noreturn]] void fail(std::size_t line, const std::string& message) const {
    throw ParseError(source_, line, message);
  }

  double number(const Row& row, std::size_t column) const {
    if (column >= row.cells.size()) fail(row.line, "missing column " + std::to_string(column + 1));
    auto value = parse_double(row.cells[column]);
    if (!value || !std::isfinite(*value)) {
      fail(row.line, "non-numeric cell '" + std::string(row.cells[column]) + "'");
    }
    return *value;
  }

  std::int64_t integer(const Row& row, std::size_t column) const {
    if (column >= row.cells.size()) fail(row.line, "missing column " + std::to_string(column + 1));
    auto value = parse_int(row.cells[column]);
    if (!value) fail(row.line, "non-integer cell '" + std::string(row.cells[column]) + "'");
    return *value;
  }

  std::string_view text(const Row& row, std::size_t column) const {
    if (column >= row.cells.size()) fail(row.line, "missing column " + std::to_string(column + 1));
    return row.cells[column];
  }

  void expect_columns(const Row& row, std::size_t count) const {
    if (row.cells.size() != count) {
      fail(row.line, "expected " + std::to_string(count) + " columns, found " +
                         std::to_string(row.cells.size()));
    }
  }

 private:
  bool same_header(std::string_view text) const {
    auto got = split(text);
    auto want = split(header_);
    if (got.size() != want.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i] != want[i]) return false;
    }
    return true;
  }

  std::istream& in_;
  std::string source_;
  std::string header_;
  std::string buffer_;
  std::size_t line_ = 0;
  bool header_seen_ = false;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace groupiv::csv

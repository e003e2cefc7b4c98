#pragma once

// Reader for the subset of TOML used by the configuration files:
//   - `# comments`, blank lines
//   - `[table]` and `[dotted.table]` headers
//   - `key = value` with bare, quoted or dotted keys (bare keys may be all digits)
//   - values: basic "strings", 'literal strings', integers, floats, booleans,
//     and single-line arrays of those
// The document is returned as a JSON object so the config layer can use
// nlohmann::json accessors. Inline tables, multi-line strings/arrays and
// date-times are rejected with a line number.

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "groupiv/csv.hpp"
#include "groupiv/error.hpp"

namespace groupiv::toml {

namespace detail {

class LineParser {
 public:
  LineParser(std::string_view text, std::string source, std::size_t line)
      : text_(text), source_(std::move(source)), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(source_, line_, message); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> parts;
    do {
      skip_ws();
      parts.push_back(key_part());
      skip_ws();
    } while (consume('.'));
    return parts;
  }

  nlohmann::json value() {
    skip_ws();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') fail("inline tables are not supported");
    return scalar();
  }

 private:
  std::string key_part() {
    if (pos_ >= text_.size()) fail("missing key");
    if (text_[pos_] == '"') return basic_string();
    if (text_[pos_] == '\'') return literal_string();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("invalid key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\'') ++pos_;
    if (pos_ >= text_.size()) fail("unterminated string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  nlohmann::json array() {
    ++pos_;
    nlohmann::json out = nlohmann::json::array();
    skip_ws();
    if (consume(']')) return out;
    for (;;) {
      out.push_back(value());
      if (consume(',')) {
        if (consume(']')) return out;
        continue;
      }
      if (consume(']')) return out;
      fail("expected ',' or ']' in array");
    }
  }

  nlohmann::json scalar() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '#' &&
           text_[pos_] != ' ' && text_[pos_] != '\t') {
      ++pos_;
    }
    std::string token(text_.substr(start, pos_ - start));
    if (token == "true") return true;
    if (token == "false") return false;
    if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    std::string digits;
    for (char c : token) {
      if (c != '_') digits.push_back(c);
    }
    const bool is_float = digits.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      if (auto v = csv::parse_int(digits)) return *v;
    }
    if (auto v = csv::parse_double(digits)) return *v;
    fail("invalid value '" + token + "'");
  }

  std::string_view text_;
  std::string source_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline nlohmann::json& descend(nlohmann::json& root, const std::vector<std::string>& path, std::size_t count,
                               const LineParser& lp) {
  nlohmann::json* node = &root;
  for (std::size_t i = 0; i < count; ++i) {
    auto& next = (*node)[path[i]];
    if (next.is_null()) next = nlohmann::json::object();
    if (!next.is_object()) lp.fail("key '" + path[i] + "' is not a table");
    node = &next;
  }
  return *node;
}

}  // namespace detail

inline nlohmann::json parse(std::istream& in, const std::string& source) {
  nlohmann::json root = nlohmann::json::object();
  std::vector<std::string> table;
  std::string buffer;
  std::size_t line = 0;
  while (std::getline(in, buffer)) {
    ++line;
    detail::LineParser lp(buffer, source, line);
    if (lp.at_end_or_comment()) continue;
    if (lp.consume('[')) {
      if (lp.consume('[')) lp.fail("arrays of tables are not supported");
      table = lp.key_path();
      if (!lp.consume(']')) lp.fail("expected ']'");
      if (!lp.at_end_or_comment()) lp.fail("unexpected text after table header");
      detail::descend(root, table, table.size(), lp);
      continue;
    }
    auto key = lp.key_path();
    if (!lp.consume('=')) lp.fail("expected '='");
    auto value = lp.value();
    if (!lp.at_end_or_comment()) lp.fail("unexpected text after value");
    std::vector<std::string> full = table;
    full.insert(full.end(), key.begin(), key.end());
    auto& parent = detail::descend(root, full, full.size() - 1, lp);
    if (parent.contains(full.back())) lp.fail("duplicate key '" + full.back() + "'");
    parent[full.back()] = std::move(value);
  }
  return root;
}

inline nlohmann::json parse_string(const std::string& text, const std::string& source = "<string>") {
  std::istringstream in(text);
  return parse(in, source);
}

}  // namespace groupiv::toml

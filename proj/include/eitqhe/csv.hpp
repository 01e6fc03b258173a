#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <fmt/format.h>

#include "eitqhe/error.hpp"

// Minimal comma-separated field handling: no quoting, one record per line.
namespace eitqhe::csv {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

inline int to_int(const std::string& field, std::size_t line) {
  int value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw Error(ErrorKind::ParseError, fmt::format("line {}: '{}' is not an integer", line, field));
  }
  return value;
}

inline double to_double(const std::string& field, std::size_t line) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw Error(ErrorKind::ParseError, fmt::format("line {}: '{}' is not a number", line, field));
  }
  return value;
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) { return fmt::format("{}", v); }

}  // namespace eitqhe::csv

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netcast/errors.hpp"

namespace netcast::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Splits one unquoted CSV line. Quoting is not supported; node ids must not contain commas.
inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    auto field = trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Reads a header line and returns, for every required column, its position.
/// Extra columns are ignored.
class Reader {
 public:
  Reader(std::istream& in, const std::vector<std::string>& required) : in_(in) {
    std::string header;
    while (std::getline(in_, header)) {
      ++line_;
      if (!trim(header).empty()) break;
    }
    if (trim(header).empty()) throw ParseError(line_ == 0 ? 1 : line_, "missing header");
    auto names = split(header);
    for (const auto& r : required) {
      std::optional<std::size_t> at;
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == r) at = i;
      if (!at) throw ParseError(line_, "header lacks column '" + r + "'");
      positions_.push_back(*at);
    }
    width_ = names.size();
  }

  /// Fills `fields` with the required columns of the next non-blank row.
  bool next(std::vector<std::string>& fields) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      if (trim(raw).empty()) continue;
      auto all = split(raw);
      if (all.size() != width_)
        throw ParseError(line_, "expected " + std::to_string(width_) + " fields, got " +
                                    std::to_string(all.size()));
      fields.clear();
      for (auto p : positions_) fields.push_back(all[p]);
      return true;
    }
    return false;
  }

  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::vector<std::size_t> positions_;
  std::size_t width_ = 0;
  std::size_t line_ = 0;
};

inline int parse_int(const std::string& s, std::size_t line, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
  return v;
}

inline double parse_double(const std::string& s, std::size_t line, const char* what) {
  if (s.empty()) throw ParseError(line, std::string("empty ") + what);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v))
    throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
  return v;
}

/// Shortest text that parses back to the same double. Every CSV writer uses it.
inline std::string format(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format(const std::optional<double>& v) { return v ? format(*v) : "NA"; }

/// Makes free text safe for an unquoted CSV cell.
inline std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace netcast::csv

#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace ridepool {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline long long parse_int(std::string_view token, const std::string& context) {
  token = trim(token);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(Errc::parse_error, context + ": expected integer, got '" + std::string(token) + "'");
  return value;
}

inline double parse_double(std::string_view token, const std::string& context) {
  token = trim(token);
  const std::string buf(token);
  char* end = nullptr;
  const double value = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size())
    fail(Errc::parse_error, context + ": expected number, got '" + std::string(token) + "'");
  return value;
}

// Shortest decimal form that round-trips the exact double value.
inline std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0;
  for (int prec = 15; prec <= 16; ++prec) {
    char trial[40];
    std::snprintf(trial, sizeof(trial), "%.*g", prec, v);
    std::sscanf(trial, "%lf", &back);
    if (back == v) return trial;
  }
  return buf;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

// Milliseconds rendered as seconds with three decimals.
inline std::string format_ms(int64_t ms) {
  const bool neg = ms < 0;
  const int64_t a = neg ? -ms : ms;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%s%lld.%03lld", neg ? "-" : "",
                static_cast<long long>(a / 1000), static_cast<long long>(a % 1000));
  return buf;
}

}  // namespace ridepool

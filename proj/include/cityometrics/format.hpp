#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace cityom {

// Shortest round-trip decimal representation; locale-free and
// deterministic, so artifact files are byte-stable.
inline std::string format_double(double v) {
  if (v == static_cast<double>(static_cast<long long>(v)) && std::fabs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

// Ratio rendered as a percentage with one decimal, e.g. 0.926 -> "92.6".
inline std::string format_percent(double ratio) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", ratio * 100.0);
  // normalize "-0.0" to "0.0"
  if (buf[0] == '-' && buf[1] == '0' && buf[2] == '.' && buf[3] == '0' && buf[4] == '\0')
    return "0.0";
  return buf;
}

}  // namespace cityom

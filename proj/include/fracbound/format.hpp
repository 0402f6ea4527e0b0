#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace fracbound {

/// Compact decimal rendering used in labels and parameter strings.
inline std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Round-trip rendering for result files.
inline std::string exact_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string short_vec(const std::vector<double>& v) {
  if (v.size() == 1) return short_num(v[0]);
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += short_num(v[i]);
  }
  return out + "]";
}

}  // namespace fracbound

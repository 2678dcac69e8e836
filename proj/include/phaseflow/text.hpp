#pragma once

// Number formatting helpers. format_double produces the shortest decimal
// string that parses back to exactly the same value, so CSV reruns diff clean.

#include <cstdio>
#include <cstdlib>
#include <string>

namespace phaseflow {

inline std::string format_double(double value) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

}  // namespace phaseflow

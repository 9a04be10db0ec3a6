#pragma once

#include <cstdio>
#include <string>

namespace ldsnoma {

/// Formats v with printf's %g at the given significant-digit count.
/// Used everywhere numbers are emitted so that identical inputs always
/// serialize to identical bytes. 17 digits round-trips a double exactly.
inline std::string format_double(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace ldsnoma

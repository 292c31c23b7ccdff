#pragma once

#include <cstdio>
#include <string>

namespace gcca {

// 17 significant digits: enough for IEEE doubles to round-trip exactly.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace gcca

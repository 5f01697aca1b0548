#pragma once

#include <cstdio>
#include <string>

namespace slcone {

// Shortest round-trip float formatting; keeps emitted files byte-stable.
inline std::string fmt_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace slcone

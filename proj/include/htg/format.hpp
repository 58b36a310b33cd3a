#pragma once

#include <cstdio>
#include <string>

namespace htg {

// Full-precision decimal form (17 significant digits) so emitted CSV/JSON is
// byte-stable and round-trips exactly.
inline std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace htg

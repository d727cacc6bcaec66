#pragma once

#include <cstdio>
#include <string>

namespace sdp {

/// Round-trippable decimal form (17 significant digits) used in every CSV/JSON
/// writer so that reruns with the same seed are byte-identical.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace sdp

#pragma once

#include <cstdio>
#include <string>

namespace quadcurv {

/// Shortest fixed-significance representation; reports print with 12
/// significant digits throughout.
inline std::string format_significant(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

}  // namespace quadcurv

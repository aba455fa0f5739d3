#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace volres {

/// 17 significant digits with '.' as decimal separator; "inf" for +infinity.
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace volres

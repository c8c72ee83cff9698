#include "satrisk/format.hpp"

#include <cstdio>

namespace satrisk {

std::string fmt_value(double v, int significant) {
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, v);
    return buf;
}

} // namespace satrisk

#include "mobility/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace mobility {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_vec3_csv(double x, double y, double z) {
    return format_double(x) + "," + format_double(y) + "," + format_double(z);
}

}  // namespace mobility

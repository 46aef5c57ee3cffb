#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace dform {

/// Six significant digits, locale independent, no negative zero.
inline std::string format_number(double v) {
    if (v == 0.0 || std::fabs(v) < 1e-300) v = 0.0;
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    std::string s(buf, res.ptr);
    if (s == "-0") s = "0";
    return s;
}

}  // namespace dform

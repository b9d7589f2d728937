#pragma once

#include <charconv>
#include <string>

namespace pucl {

/// Shortest decimal form that parses back to the identical double. Keeps
/// CSV traces byte-reproducible across runs.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace pucl

#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace pfr {

/// Scientific notation with a fixed number of significant digits,
/// locale-independent (used for CSV and table output).
inline std::string format_sci(double x, int significant = 12) {
    char buf[64];
    const auto result =
        std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::scientific, significant - 1);
    return std::string(buf, result.ptr);
}

/// Shortest round-trip representation.
inline std::string format_full(double x) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, result.ptr);
}

/// Strict full-string double parse; returns false on trailing garbage.
inline bool parse_double(std::string_view text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto result = std::from_chars(begin, end, out);
    return result.ec == std::errc() && result.ptr == end;
}

inline bool parse_int(std::string_view text, long long& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto result = std::from_chars(begin, end, out);
    return result.ec == std::errc() && result.ptr == end;
}

}  // namespace pfr

#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace wdmsim {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

/// Parses the full string as a double; returns false on trailing garbage.
inline bool parse_double(std::string_view text, double& out) {
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

}  // namespace wdmsim

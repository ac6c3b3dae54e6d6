#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace freeforce::text {

/// Shortest decimal form that parses back to the same double.
inline std::string shortest(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// Six significant digits, printf %g style.
inline std::string sig6(double v) {
    if (v == 0.0) v = 0.0;
    std::array<char, 32> buf{};
    const int len = std::snprintf(buf.data(), buf.size(), "%.6g", v);
    return std::string(buf.data(), static_cast<std::size_t>(len));
}

inline std::string fixed(double v, int decimals) {
    if (v == 0.0) v = 0.0;
    std::array<char, 48> buf{};
    const int len = std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
    std::string out(buf.data(), static_cast<std::size_t>(len));
    if (out.starts_with("-") && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

/// Strict decimal parse: the whole token must be a finite number.
inline std::optional<double> parse_double(std::string_view token) {
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t')) token.remove_suffix(1);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

} // namespace freeforce::text

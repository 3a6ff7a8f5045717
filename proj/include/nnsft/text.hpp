#pragma once

// Small helpers shared by the line-oriented file formats.

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nnsft/error.hpp"

namespace nnsft::text {

inline std::string_view strip_comment(std::string_view line) {
    if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
    return line;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::vector<std::string_view> lines(std::string_view body) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= body.size()) {
        auto end = body.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < body.size()) out.push_back(body.substr(start));
            break;
        }
        out.push_back(body.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

template <typename Int>
std::optional<Int> to_int(std::string_view token) {
    Int value{};
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return value;
}

inline std::optional<double> to_double(std::string_view token) {
    // from_chars for floating point is missing on some toolchains still in use.
    std::string s(token);
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    double value = 0.0;
    in >> value;
    if (in.fail()) return std::nullopt;
    in >> std::ws;
    if (!in.eof()) return std::nullopt;
    return value;
}

/// Accepts "0.015625" as well as "1/64".
inline double parse_real_or_ratio(std::string_view token) {
    if (auto slash = token.find('/'); slash != std::string_view::npos) {
        auto num = to_double(token.substr(0, slash));
        auto den = to_double(token.substr(slash + 1));
        if (!num || !den || *den == 0.0)
            throw InputError("invalid rational '" + std::string(token) + "'");
        return *num / *den;
    }
    auto v = to_double(token);
    if (!v) throw InputError("invalid number '" + std::string(token) + "'");
    return *v;
}

inline std::string line_error(std::size_t line_no, const std::string& what) {
    return "line " + std::to_string(line_no) + ": " + what;
}

}  // namespace nnsft::text

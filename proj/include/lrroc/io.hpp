#pragma once

// Text input for the command-line tool: headered `value,group` CSV files and
// plain one-value-per-line files.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lrroc/data_model.hpp"
#include "lrroc/error.hpp"

namespace lrroc {

struct InputRecord {
    double value = 0.0;
    int group = 0;  // 0 healthy, 1 diseased

    friend bool operator==(const InputRecord&, const InputRecord&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace detail

/// Reads a CSV whose first line is the header `value,group`. Blank lines are
/// skipped; anything else malformed is an InvalidData error naming the line.
inline std::vector<InputRecord> parse_records_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<InputRecord> out;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = detail::trim(line);
        if (lineno == 1 && s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
        if (s.empty()) continue;
        const auto comma = s.find(',');
        if (comma == std::string_view::npos || s.find(',', comma + 1) != std::string_view::npos)
            throw Error(ErrorCode::InvalidData, detail::where(lineno) + "expected two comma-separated fields");
        const auto f1 = detail::trim(s.substr(0, comma));
        const auto f2 = detail::trim(s.substr(comma + 1));
        if (!header) {
            if (f1 != "value" || f2 != "group")
                throw Error(ErrorCode::InvalidData, detail::where(lineno) + "header must be 'value,group'");
            header = true;
            continue;
        }
        InputRecord r;
        if (!detail::parse_double(f1, r.value))
            throw Error(ErrorCode::InvalidData, detail::where(lineno) + "value is not a finite number");
        if (f2 == "0") r.group = 0;
        else if (f2 == "1") r.group = 1;
        else throw Error(ErrorCode::InvalidData, detail::where(lineno) + "group must be 0 or 1");
        out.push_back(r);
    }
    if (!header) throw Error(ErrorCode::InvalidData, "empty input: missing 'value,group' header");
    return out;
}

/// Writes records with round-trip (17 significant digit) precision.
inline std::string serialize_records_csv(std::span<const InputRecord> records) {
    std::string out = "value,group\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g,%d\n", r.value, r.group);
        out += buf;
    }
    return out;
}

/// One value per line; a non-numeric first line is taken as a header.
inline std::vector<double> parse_value_list(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<double> out;
    while (std::getline(in, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty()) continue;
        double v;
        if (!detail::parse_double(s, v)) {
            if (lineno == 1) continue;
            throw Error(ErrorCode::InvalidData, detail::where(lineno) + "value is not a finite number");
        }
        out.push_back(v);
    }
    return out;
}

inline TwoSampleData records_to_data(std::span<const InputRecord> records) {
    std::vector<double> x, y;
    for (const auto& r : records) (r.group == 0 ? x : y).push_back(r.value);
    return TwoSampleData(std::move(x), std::move(y));
}

}  // namespace lrroc

#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ffcdnn/error.hpp"

namespace ffcdnn::csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && !s.empty();
}

inline bool parse_long(std::string_view s, long long& out) {
    s = trim(s);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && !s.empty();
}

/// Line-oriented reader that tracks 1-based line numbers for diagnostics and
/// skips blank lines.
class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw InvalidArgument("cannot open " + path);
    }

    bool next(std::vector<std::string_view>& fields) {
        while (std::getline(in_, line_)) {
            ++line_no_;
            if (trim(line_).empty()) continue;
            fields = split(line_);
            return true;
        }
        return false;
    }

    std::size_t line() const noexcept { return line_no_; }
    const std::string& path() const noexcept { return path_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, line_no_, what); }

    double number(std::string_view s, const char* field) const {
        double v = 0.0;
        if (!parse_double(s, v)) fail(std::string("bad number in '") + field + "': '" + std::string(s) + "'");
        return v;
    }

    long long integer(std::string_view s, const char* field) const {
        long long v = 0;
        if (!parse_long(s, v)) fail(std::string("bad integer in '") + field + "': '" + std::string(s) + "'");
        return v;
    }

    /// Index of `name` in a header row, or fail with a missing-column error.
    std::size_t column(const std::vector<std::string_view>& header, std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        fail("missing column '" + std::string(name) + "'");
    }

private:
    std::string path_;
    std::ifstream in_;
    std::string line_;
    std::size_t line_no_ = 0;
};

} // namespace ffcdnn::csv

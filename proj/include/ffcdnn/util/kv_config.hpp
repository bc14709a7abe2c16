#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/util/csv.hpp"

namespace ffcdnn {

/// Flat `key = value` text with `#` comments. Keys are kept sorted so the
/// serialized form is stable.
class KeyValues {
public:
    static KeyValues parse(const std::string& text, const std::string& source = "<config>") {
        KeyValues kv;
        std::istringstream in(text);
        std::string line;
        std::size_t no = 0;
        while (std::getline(in, line)) {
            ++no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto t = csv::trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string_view::npos) throw ParseError(source, no, "expected key = value");
            const std::string key(csv::trim(t.substr(0, eq)));
            const std::string value(csv::trim(t.substr(eq + 1)));
            if (key.empty()) throw ParseError(source, no, "empty key");
            kv.values_[key] = value;
        }
        return kv;
    }

    static KeyValues load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot open config " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    std::string to_string() const {
        std::string out;
        for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
        return out;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string>& entries() const noexcept { return values_; }

    std::string get(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double number(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        double v = 0.0;
        if (!csv::parse_double(it->second, v)) throw InvalidArgument("config: '" + key + "' is not a number");
        return v;
    }

    std::size_t count(const std::string& key, std::size_t fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        long long v = 0;
        if (!csv::parse_long(it->second, v) || v < 0)
            throw InvalidArgument("config: '" + key + "' is not a non-negative integer");
        return static_cast<std::size_t>(v);
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        for (auto part : csv::split(it->second)) {
            double v = 0.0;
            if (!csv::parse_double(part, v)) throw InvalidArgument("config: '" + key + "' expects a comma-separated list of numbers");
            out.push_back(v);
        }
        return out;
    }

    /// Throws on any key not in `known`.
    void require_known(const std::vector<std::string>& known) const {
        for (const auto& [k, v] : values_) {
            bool ok = false;
            for (const auto& n : known) ok = ok || n == k;
            if (!ok) throw InvalidArgument("config: unknown key '" + k + "'");
        }
    }

private:
    std::map<std::string, std::string> values_;
};

inline std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace ffcdnn

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ffcdnn/classes.hpp"
#include "ffcdnn/error.hpp"
#include "ffcdnn/util/csv.hpp"

namespace ffcdnn::eval {

/// Square count matrix; rows are predicted classes, columns actual classes.
/// Row sums are therefore the user's-accuracy denominators.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t classes = kNumClasses) : z_(classes), counts_(classes * classes, 0) {
        if (classes == 0) throw InvalidArgument("confusion matrix needs at least one class");
    }

    static ConfusionMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
        ConfusionMatrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw InvalidArgument("confusion matrix must be square");
            for (std::size_t j = 0; j < rows.size(); ++j) {
                if (rows[i][j] < 0) throw InvalidArgument("confusion matrix counts must be non-negative");
                m.at(i, j) = rows[i][j];
            }
        }
        return m;
    }

    std::size_t classes() const noexcept { return z_; }
    long long& at(std::size_t predicted, std::size_t actual) { return counts_[predicted * z_ + actual]; }
    long long at(std::size_t predicted, std::size_t actual) const { return counts_[predicted * z_ + actual]; }

    void add(StressClass predicted, StressClass actual) { ++at(index_of(predicted), index_of(actual)); }

    long long total() const {
        long long t = 0;
        for (auto c : counts_) t += c;
        return t;
    }
    long long row_sum(std::size_t i) const {
        long long t = 0;
        for (std::size_t j = 0; j < z_; ++j) t += at(i, j);
        return t;
    }
    long long col_sum(std::size_t j) const {
        long long t = 0;
        for (std::size_t i = 0; i < z_; ++i) t += at(i, j);
        return t;
    }
    long long trace() const {
        long long t = 0;
        for (std::size_t i = 0; i < z_; ++i) t += at(i, i);
        return t;
    }

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t z_;
    std::vector<long long> counts_;
};

inline ConfusionMatrix confusion_from(const std::vector<StressClass>& predicted, const std::vector<StressClass>& actual) {
    if (predicted.size() != actual.size()) throw InvalidArgument("confusion: prediction/label count mismatch");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predicted.size(); ++i) m.add(predicted[i], actual[i]);
    return m;
}

/// CSV with a header `predicted\actual,<class>,...` and one row per predicted
/// class in the same order.
inline ConfusionMatrix load_matrix_csv(const std::string& path) {
    csv::Reader in(path);
    std::vector<std::string_view> f;
    if (!in.next(f)) in.fail("empty matrix file");
    const std::size_t z = f.size() - 1;
    if (z != kNumClasses) in.fail("expected " + std::to_string(kNumClasses) + " class columns");
    for (std::size_t j = 0; j < z; ++j)
        if (f[j + 1] != kClassNames[j]) in.fail("column " + std::to_string(j + 1) + " should be " + std::string(kClassNames[j]));
    ConfusionMatrix m(z);
    std::size_t row = 0;
    while (in.next(f)) {
        if (row == z) in.fail("too many rows");
        if (f.size() != z + 1) in.fail("expected " + std::to_string(z + 1) + " fields");
        if (f[0] != kClassNames[row]) in.fail("row " + std::to_string(row + 1) + " should be " + std::string(kClassNames[row]));
        for (std::size_t j = 0; j < z; ++j) {
            const auto v = in.integer(f[j + 1], "count");
            if (v < 0) in.fail("negative count");
            m.at(row, j) = v;
        }
        ++row;
    }
    if (row != z) in.fail("expected " + std::to_string(z) + " rows");
    return m;
}

inline std::string matrix_csv(const ConfusionMatrix& m) {
    std::string out = "predicted\\actual";
    for (std::size_t j = 0; j < m.classes(); ++j) out += "," + std::string(kClassNames[j]);
    out += "\n";
    for (std::size_t i = 0; i < m.classes(); ++i) {
        out += std::string(kClassNames[i]);
        for (std::size_t j = 0; j < m.classes(); ++j) out += "," + std::to_string(m.at(i, j));
        out += "\n";
    }
    return out;
}

/// Percentages for OA/UA/PA. A class whose row (UA) or column (PA) is empty
/// yields std::nullopt; kappa is nullopt when chance agreement is 1.
struct MetricReport {
    double oa = 0.0;
    std::vector<std::optional<double>> ua;
    std::vector<std::optional<double>> pa;
    std::optional<double> kappa;
    std::optional<double> ct_seconds;
};

inline MetricReport confusion_metrics(const ConfusionMatrix& m) {
    const double total = static_cast<double>(m.total());
    if (total <= 0.0) throw InvalidArgument("confusion matrix is empty");
    MetricReport r;
    const double po = static_cast<double>(m.trace()) / total;
    r.oa = 100.0 * po;
    double pe = 0.0;
    for (std::size_t h = 0; h < m.classes(); ++h) {
        const double row = static_cast<double>(m.row_sum(h)), col = static_cast<double>(m.col_sum(h));
        const double d = static_cast<double>(m.at(h, h));
        r.ua.push_back(row > 0 ? std::optional<double>(100.0 * d / row) : std::nullopt);
        r.pa.push_back(col > 0 ? std::optional<double>(100.0 * d / col) : std::nullopt);
        pe += row * col;
    }
    pe /= total * total;
    if (pe < 1.0) r.kappa = (po - pe) / (1.0 - pe);
    return r;
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json report_json(const MetricReport& r, const ConfusionMatrix& m) {
    nlohmann::json j;
    j["classes"] = nlohmann::json::array();
    for (std::size_t h = 0; h < m.classes(); ++h) j["classes"].push_back(std::string(kClassNames[h]));
    j["orientation"] = "rows=predicted, columns=actual";
    j["matrix"] = nlohmann::json::array();
    for (std::size_t i = 0; i < m.classes(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < m.classes(); ++k) row.push_back(m.at(i, k));
        j["matrix"].push_back(row);
    }
    j["oa_percent"] = r.oa;
    j["kappa"] = optional_json(r.kappa);
    nlohmann::json ua = nlohmann::json::object(), pa = nlohmann::json::object();
    for (std::size_t h = 0; h < m.classes(); ++h) {
        ua[std::string(kClassNames[h])] = optional_json(r.ua[h]);
        pa[std::string(kClassNames[h])] = optional_json(r.pa[h]);
    }
    j["ua_percent"] = ua;
    j["pa_percent"] = pa;
    j["ct_seconds"] = optional_json(r.ct_seconds);
    return j;
}

/// Table layout: one row per predicted class with its counts and U(%), a P(%)
/// row, then OA, Kappa and CT. Undefined entries print as "n/a".
inline std::string report_text(const MetricReport& r, const ConfusionMatrix& m) {
    auto fmt = [](const std::optional<double>& v, int prec) {
        if (!v) return std::string("n/a");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.*f", prec, *v);
        return std::string(buf);
    };
    auto cell = [](const std::string& s, int w) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%*s", w, s.c_str());
        return std::string(buf);
    };
    const int w = 20;
    std::string out = cell("", w);
    for (std::size_t j = 0; j < m.classes(); ++j) out += cell(std::string(kClassNames[j]), w);
    out += cell("U(%)", w) + "\n";
    for (std::size_t i = 0; i < m.classes(); ++i) {
        out += cell(std::string(kClassNames[i]), w);
        for (std::size_t j = 0; j < m.classes(); ++j) out += cell(std::to_string(m.at(i, j)), w);
        out += cell(fmt(r.ua[i], 1), w) + "\n";
    }
    out += cell("P(%)", w);
    for (std::size_t j = 0; j < m.classes(); ++j) out += cell(fmt(r.pa[j], 1), w);
    out += "\n";
    out += cell("OA(%)", w) + cell(fmt(r.oa, 1), w) + "\n";
    out += cell("Kappa", w) + cell(fmt(r.kappa, 3), w) + "\n";
    out += cell("CT(s)", w) + cell(fmt(r.ct_seconds, 1), w) + "\n";
    return out;
}

} // namespace ffcdnn::eval

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/s2/band_simulation.hpp"
#include "ffcdnn/util/csv.hpp"

namespace ffcdnn::s2 {

/// One Sentinel-2 observation of one pixel. `date` is a day-of-season index.
struct Sentinel2Record {
    long long row = 0;
    long long col = 0;
    long long date = 0;
    std::array<double, 7> bands{}; // B2..B8

    double band(Band b) const { return bands[static_cast<std::size_t>(b)]; }
    bool operator==(const Sentinel2Record&) const = default;
};

struct PixelSeries {
    long long row = 0;
    long long col = 0;
    std::vector<Sentinel2Record> records; // ascending date
    bool operator==(const PixelSeries&) const = default;
};

/// Pixels in row-major (row, col) order.
using SeriesCollection = std::vector<PixelSeries>;

/// Parses `row,col,date,B2,...,B8`. Columns may appear in any order; every one
/// is required. Records are grouped per pixel and sorted by date; a repeated
/// (pixel, date) is a parse error reported at the second occurrence.
inline SeriesCollection load_series(const std::string& path) {
    csv::Reader rd(path);
    std::vector<std::string_view> f;
    if (!rd.next(f)) return {};
    const std::size_t c_row = rd.column(f, "row");
    const std::size_t c_col = rd.column(f, "col");
    const std::size_t c_date = rd.column(f, "date");
    std::array<std::size_t, 7> c_band{};
    for (std::size_t b = 0; b < 7; ++b) c_band[b] = rd.column(f, kBandNames[b]);
    const std::size_t width = f.size();

    std::map<std::pair<long long, long long>, std::map<long long, Sentinel2Record>> grouped;
    while (rd.next(f)) {
        if (f.size() != width) rd.fail("expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()));
        Sentinel2Record r;
        r.row = rd.integer(f[c_row], "row");
        r.col = rd.integer(f[c_col], "col");
        r.date = rd.integer(f[c_date], "date");
        if (r.date < 0) rd.fail("negative date");
        for (std::size_t b = 0; b < 7; ++b) {
            const double v = rd.number(f[c_band[b]], kBandNames[b]);
            if (!std::isfinite(v) || v < 0.0 || v > 1.5) rd.fail(std::string("reflectance out of range in ") + kBandNames[b]);
            r.bands[b] = v;
        }
        auto& per_pixel = grouped[{r.row, r.col}];
        if (!per_pixel.emplace(r.date, r).second)
            rd.fail("duplicate observation for pixel (" + std::to_string(r.row) + "," + std::to_string(r.col) +
                    ") on date " + std::to_string(r.date));
    }

    SeriesCollection out;
    out.reserve(grouped.size());
    for (auto& [key, by_date] : grouped) {
        PixelSeries ps{key.first, key.second, {}};
        for (auto& [d, rec] : by_date) ps.records.push_back(rec);
        out.push_back(std::move(ps));
    }
    return out;
}

inline void write_series(const std::string& path, const SeriesCollection& series) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << "row,col,date,B2,B3,B4,B5,B6,B7,B8\n";
    out << std::setprecision(10);
    for (const auto& px : series)
        for (const auto& r : px.records) {
            out << r.row << ',' << r.col << ',' << r.date;
            for (double v : r.bands) out << ',' << v;
            out << '\n';
        }
}

/// `wavelength_nm,reflectance`
inline HyperSpectrum load_spectrum(const std::string& path) {
    csv::Reader rd(path);
    std::vector<std::string_view> f;
    if (!rd.next(f)) throw ParseError(path, 0, "empty spectra file");
    const std::size_t c_wl = rd.column(f, "wavelength_nm");
    const std::size_t c_r = rd.column(f, "reflectance");
    std::vector<double> wl, refl;
    while (rd.next(f)) {
        if (f.size() <= std::max(c_wl, c_r)) rd.fail("missing field");
        wl.push_back(rd.number(f[c_wl], "wavelength_nm"));
        refl.push_back(rd.number(f[c_r], "reflectance"));
    }
    if (wl.empty()) throw ParseError(path, rd.line(), "spectra file has no samples");
    try {
        return HyperSpectrum(std::move(wl), std::move(refl));
    } catch (const InvalidArgument& e) {
        throw ParseError(path, rd.line(), e.what());
    }
}

/// `band,wavelength_nm,response`; returns one curve per band in B2..B8 order.
inline std::vector<RSRCurve> load_rsr(const std::string& path) {
    csv::Reader rd(path);
    std::vector<std::string_view> f;
    if (!rd.next(f)) throw ParseError(path, 0, "empty RSR file");
    const std::size_t c_band = rd.column(f, "band");
    const std::size_t c_wl = rd.column(f, "wavelength_nm");
    const std::size_t c_resp = rd.column(f, "response");
    std::map<Band, std::pair<std::vector<double>, std::vector<double>>> curves;
    while (rd.next(f)) {
        if (f.size() <= std::max({c_band, c_wl, c_resp})) rd.fail("missing field");
        Band b{};
        try {
            b = parse_band(f[c_band]);
        } catch (const InvalidArgument& e) {
            rd.fail(e.what());
        }
        auto& [wl, resp] = curves[b];
        wl.push_back(rd.number(f[c_wl], "wavelength_nm"));
        resp.push_back(rd.number(f[c_resp], "response"));
    }
    std::vector<RSRCurve> out;
    for (auto& [b, c] : curves) {
        try {
            out.emplace_back(b, std::move(c.first), std::move(c.second));
        } catch (const InvalidArgument& e) {
            throw ParseError(path, rd.line(), std::string(band_name(b)) + ": " + e.what());
        }
    }
    return out;
}

} // namespace ffcdnn::s2

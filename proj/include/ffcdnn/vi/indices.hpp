#pragma once

#include <cmath>
#include <string>

#include "ffcdnn/error.hpp"
#include "ffcdnn/s2/band_simulation.hpp"
#include "ffcdnn/s2/series_io.hpp"

namespace ffcdnn::vi {

/// Which Sentinel-2 band stands in for each reflectance the indices need.
struct BandMapping {
    s2::Band red = s2::Band::B4;
    s2::Band nir = s2::Band::B8;
    s2::Band r550 = s2::Band::B3;
    s2::Band r670 = s2::Band::B4;
    s2::Band r700 = s2::Band::B5;
    s2::Band r800 = s2::Band::B8;

    std::string to_string() const;
    static BandMapping parse(const std::string& text);
};

/// Calibration constants. The defaults are placeholders; override per site.
struct PrefilterConfig {
    double soil_slope = 1.0;
    double clair_alpha = 0.4;
    double wdvi_inf = 0.6;
    BandMapping mapping{};
};

struct VIPair {
    double vi_lai = 0.0;
    double vi_lcc = 0.0;
};

namespace detail {
inline void check_reflectance(double r, const char* what) {
    if (!std::isfinite(r) || r < 0.0 || r > 1.5)
        throw InvalidArgument(std::string(what) + ": reflectance outside [0, 1.5]");
}
} // namespace detail

/// Weighted difference vegetation index, nir - a * red.
inline double wdvi(double nir, double red, double soil_slope) {
    detail::check_reflectance(nir, "wdvi nir");
    detail::check_reflectance(red, "wdvi red");
    if (!(soil_slope > 0.0)) throw InvalidArgument("wdvi: soil slope must be positive");
    return nir - soil_slope * red;
}

/// TCARI / OSAVI chlorophyll ratio.
inline double tcari_osavi(double r550, double r670, double r700, double r800) {
    detail::check_reflectance(r550, "tcari_osavi r550");
    detail::check_reflectance(r670, "tcari_osavi r670");
    detail::check_reflectance(r700, "tcari_osavi r700");
    detail::check_reflectance(r800, "tcari_osavi r800");
    if (!(r670 > 0.0)) throw DegenerateError("tcari_osavi: r670 must be positive");
    const double tcari = 3.0 * ((r700 - r670) - 0.2 * (r700 - r550) * (r700 / r670));
    const double osavi = 1.16 * (r800 - r670) / (r800 + r670 + 0.16);
    if (std::abs(osavi) <= 1e-6) throw DegenerateError("tcari_osavi: OSAVI too close to zero");
    return tcari / osavi;
}

/// CLAIR-style inversion LAI = -(1/alpha) ln(1 - WDVI / WDVI_inf).
/// Values at or past the asymptote are reported, never clamped.
inline double vi_lai(double wdvi_value, double alpha, double wdvi_inf) {
    if (!(alpha > 0.0) || !(wdvi_inf > 0.0)) throw InvalidArgument("vi_lai: alpha and wdvi_inf must be positive");
    if (!std::isfinite(wdvi_value) || wdvi_value < 0.0) throw InvalidArgument("vi_lai: wdvi must be >= 0");
    if (wdvi_value >= wdvi_inf)
        throw SaturationError("vi_lai: wdvi " + std::to_string(wdvi_value) + " reaches asymptote " +
                              std::to_string(wdvi_inf));
    return -std::log1p(-wdvi_value / wdvi_inf) / alpha;
}

inline VIPair compute_vi(const s2::Sentinel2Record& rec, const PrefilterConfig& cfg) {
    const auto& m = cfg.mapping;
    const double w = wdvi(rec.band(m.nir), rec.band(m.red), cfg.soil_slope);
    return {vi_lai(w, cfg.clair_alpha, cfg.wdvi_inf),
            tcari_osavi(rec.band(m.r550), rec.band(m.r670), rec.band(m.r700), rec.band(m.r800))};
}

inline std::string BandMapping::to_string() const {
    using s2::band_name;
    return std::string("red=") + band_name(red) + ";nir=" + band_name(nir) + ";r550=" + band_name(r550) +
           ";r670=" + band_name(r670) + ";r700=" + band_name(r700) + ";r800=" + band_name(r800);
}

inline BandMapping BandMapping::parse(const std::string& text) {
    BandMapping m;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find(';', start);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(start, end - start);
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidArgument("s2_band_mapping: expected key=band, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const s2::Band b = s2::parse_band(item.substr(eq + 1));
        if (key == "red") m.red = b;
        else if (key == "nir") m.nir = b;
        else if (key == "r550") m.r550 = b;
        else if (key == "r670") m.r670 = b;
        else if (key == "r700") m.r700 = b;
        else if (key == "r800") m.r800 = b;
        else throw InvalidArgument("s2_band_mapping: unknown key '" + key + "'");
        start = end + 1;
    }
    return m;
}

} // namespace ffcdnn::vi

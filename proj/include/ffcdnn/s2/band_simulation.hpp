#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ffcdnn/error.hpp"

namespace ffcdnn::s2 {

/// Ground reflectance sampled on a strictly increasing wavelength grid (nm).
/// The grid may be irregular.
class HyperSpectrum {
public:
    HyperSpectrum(std::vector<double> wavelengths_nm, std::vector<double> reflectance)
        : wl_(std::move(wavelengths_nm)), refl_(std::move(reflectance)) {
        if (wl_.size() != refl_.size()) throw InvalidArgument("spectrum: wavelength/reflectance length mismatch");
        if (wl_.size() < 2) throw InvalidArgument("spectrum: need at least two samples");
        for (std::size_t i = 0; i < wl_.size(); ++i) {
            if (!std::isfinite(wl_[i]) || wl_[i] < 400.0 || wl_[i] > 1000.0)
                throw InvalidArgument("spectrum: wavelength outside [400, 1000] nm");
            if (i && !(wl_[i] > wl_[i - 1])) throw InvalidArgument("spectrum: wavelengths must be strictly increasing");
            if (!std::isfinite(refl_[i]) || refl_[i] < 0.0 || refl_[i] > 1.5)
                throw InvalidArgument("spectrum: reflectance outside [0, 1.5]");
        }
    }

    std::span<const double> wavelengths() const noexcept { return wl_; }
    std::span<const double> reflectance() const noexcept { return refl_; }

private:
    std::vector<double> wl_;
    std::vector<double> refl_;
};

enum class Band { B2, B3, B4, B5, B6, B7, B8 };
inline constexpr std::array<Band, 7> kAllBands{Band::B2, Band::B3, Band::B4, Band::B5, Band::B6, Band::B7, Band::B8};
inline constexpr std::array<const char*, 7> kBandNames{"B2", "B3", "B4", "B5", "B6", "B7", "B8"};

inline const char* band_name(Band b) { return kBandNames[static_cast<std::size_t>(b)]; }

inline Band parse_band(std::string_view name) {
    for (std::size_t i = 0; i < kBandNames.size(); ++i)
        if (name == kBandNames[i]) return kAllBands[i];
    throw InvalidArgument("unknown band '" + std::string(name) + "'");
}

/// Relative spectral response of one sensor band. The integration window
/// [start, end] is the curve's own wavelength support.
class RSRCurve {
public:
    RSRCurve(Band band, std::vector<double> wavelengths_nm, std::vector<double> response)
        : band_(band), wl_(std::move(wavelengths_nm)), resp_(std::move(response)) {
        if (wl_.size() != resp_.size() || wl_.size() < 2) throw InvalidArgument("rsr: need >= 2 matched samples");
        for (std::size_t i = 0; i < wl_.size(); ++i) {
            if (i && !(wl_[i] > wl_[i - 1])) throw InvalidArgument("rsr: wavelengths must be strictly increasing");
            if (!std::isfinite(resp_[i]) || resp_[i] < 0.0 || resp_[i] > 1.0)
                throw InvalidArgument("rsr: response outside [0, 1]");
        }
    }

    Band band() const noexcept { return band_; }
    double start() const noexcept { return wl_.front(); }
    double end() const noexcept { return wl_.back(); }
    std::span<const double> wavelengths() const noexcept { return wl_; }
    std::span<const double> response() const noexcept { return resp_; }

private:
    Band band_;
    std::vector<double> wl_;
    std::vector<double> resp_;
};

/// Piecewise-linear interpolation on a strictly increasing grid; x must lie
/// inside [xs.front(), xs.back()].
inline double interpolate_linear(std::span<const double> xs, std::span<const double> ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

/// Band-equivalent reflectance: integral(R * RSR) / integral(RSR) over the
/// band window. Both curves are linear between the merged grid points, so
/// each segment integral is exact.
inline double simulate_band(const HyperSpectrum& spectrum, const RSRCurve& rsr) {
    const auto swl = spectrum.wavelengths();
    const double lo = rsr.start();
    const double hi = rsr.end();
    if (swl.front() > lo || swl.back() < hi)
        throw CoverageError(std::string("simulate_band: spectrum does not cover band ") + band_name(rsr.band()));

    std::vector<double> grid(rsr.wavelengths().begin(), rsr.wavelengths().end());
    for (double w : swl)
        if (w > lo && w < hi) grid.push_back(w);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double num = 0.0;
    double den = 0.0;
    double prev_w = grid.front();
    double prev_r = interpolate_linear(rsr.wavelengths(), rsr.response(), prev_w);
    double prev_s = interpolate_linear(swl, spectrum.reflectance(), prev_w);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double w = grid[i];
        const double r = interpolate_linear(rsr.wavelengths(), rsr.response(), w);
        const double s = interpolate_linear(swl, spectrum.reflectance(), w);
        const double dw = w - prev_w;
        num += dw * (2.0 * prev_r * prev_s + prev_r * s + r * prev_s + 2.0 * r * s) / 6.0;
        den += 0.5 * dw * (prev_r + r);
        prev_w = w;
        prev_r = r;
        prev_s = s;
    }
    if (!(den > 0.0))
        throw DegenerateError(std::string("simulate_band: zero RSR integral for band ") + band_name(rsr.band()));
    return num / den;
}

} // namespace ffcdnn::s2

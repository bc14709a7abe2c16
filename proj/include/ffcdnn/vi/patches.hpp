#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/s2/series_io.hpp"
#include "ffcdnn/vi/indices.hpp"

namespace ffcdnn::vi {

enum class Channel : std::size_t { LAI = 0, LCC = 1 };
inline constexpr std::size_t kChannels = 2;

/// k x k spatial neighbourhood x K1 uniform time steps x {LAI, LCC}.
/// Stored as ((row * k + col) * K1 + t) * 2 + channel.
class AgentPatch {
public:
    AgentPatch() = default;

    AgentPatch(std::size_t k, std::size_t steps) : k_(k), steps_(steps), values_(k * k * steps * kChannels, 0.0) {
        if (k == 0 || steps == 0) throw InvalidArgument("patch: k and K1 must be positive");
    }

    AgentPatch(std::size_t k, std::size_t steps, std::vector<double> values)
        : k_(k), steps_(steps), values_(std::move(values)) {
        if (values_.size() != k * k * steps * kChannels) throw InvalidArgument("patch: value count mismatch");
        for (double v : values_)
            if (!std::isfinite(v)) throw InvalidArgument("patch: non-finite value");
    }

    std::size_t k() const noexcept { return k_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t pixels() const noexcept { return k_ * k_; }

    double& at(std::size_t r, std::size_t c, std::size_t t, Channel ch) {
        return values_[((r * k_ + c) * steps_ + t) * kChannels + static_cast<std::size_t>(ch)];
    }
    double at(std::size_t r, std::size_t c, std::size_t t, Channel ch) const {
        return values_[((r * k_ + c) * steps_ + t) * kChannels + static_cast<std::size_t>(ch)];
    }

    /// Time series of one pixel (flattened index p = r * k + c) and channel.
    std::vector<double> series(std::size_t p, Channel ch) const {
        std::vector<double> s(steps_);
        for (std::size_t t = 0; t < steps_; ++t) s[t] = values_[(p * steps_ + t) * kChannels + static_cast<std::size_t>(ch)];
        return s;
    }

    void set_series(std::size_t p, Channel ch, std::span<const double> s) {
        if (s.size() != steps_) throw InvalidArgument("patch: series length mismatch");
        for (std::size_t t = 0; t < steps_; ++t) values_[(p * steps_ + t) * kChannels + static_cast<std::size_t>(ch)] = s[t];
    }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool operator==(const AgentPatch&) const = default;

private:
    std::size_t k_ = 0;
    std::size_t steps_ = 0;
    std::vector<double> values_;
};

/// K1 evenly spaced days from first_day to last_day inclusive.
struct DayGrid {
    double first_day = 0.0;
    double last_day = 0.0;
    std::size_t steps = 52;

    double day(std::size_t i) const {
        if (steps == 1) return first_day;
        return first_day + (last_day - first_day) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
};

struct PatchSpec {
    std::size_t k = 3;
    std::size_t steps = 52; // K1
};

struct LocatedPatch {
    long long row = 0;
    long long col = 0;
    AgentPatch patch;
};

/// Linear interpolation of (days, values) at `day`; constant beyond the ends.
inline double interpolate_series(std::span<const double> days, std::span<const double> values, double day) {
    if (day <= days.front()) return values.front();
    if (day >= days.back()) return values.back();
    const auto it = std::upper_bound(days.begin(), days.end(), day);
    const std::size_t hi = static_cast<std::size_t>(it - days.begin());
    const std::size_t lo = hi - 1;
    const double t = (day - days[lo]) / (days[hi] - days[lo]);
    return values[lo] + t * (values[hi] - values[lo]);
}

/// Grid spanning the earliest to latest observation in the collection.
inline DayGrid default_grid(const s2::SeriesCollection& series, std::size_t steps) {
    DayGrid g{0.0, 0.0, steps};
    bool first = true;
    for (const auto& px : series)
        for (const auto& r : px.records) {
            const double d = static_cast<double>(r.date);
            if (first) {
                g.first_day = g.last_day = d;
                first = false;
            }
            g.first_day = std::min(g.first_day, d);
            g.last_day = std::max(g.last_day, d);
        }
    return g;
}

/// Builds one patch per pixel, centred on it, in row-major pixel order.
/// Each pixel's (VI_LAI, VI_LCC) observations are interpolated onto `grid`;
/// neighbours beyond the bounding box clamp to the border, and a neighbour
/// position with no data inside the box borrows the centre pixel's series.
inline std::vector<LocatedPatch> build_patches(const s2::SeriesCollection& series, const PatchSpec& spec,
                                               const DayGrid& grid, const PrefilterConfig& cfg) {
    if (spec.k % 2 == 0) throw InvalidArgument("build_patches: k must be odd");
    if (spec.steps % 2 != 0 || spec.steps < 2) throw InvalidArgument("build_patches: K1 must be even");
    if (grid.steps != spec.steps) throw InvalidArgument("build_patches: grid length differs from K1");
    if (series.empty()) return {};

    // Per-pixel interpolated (LAI, LCC) series.
    std::map<std::pair<long long, long long>, std::pair<std::vector<double>, std::vector<double>>> dense;
    long long rmin = series.front().row, rmax = rmin, cmin = series.front().col, cmax = cmin;
    for (const auto& px : series) {
        if (px.records.size() < 2)
            throw InsufficientDataError("build_patches: pixel (" + std::to_string(px.row) + "," +
                                        std::to_string(px.col) + ") has fewer than 2 observations");
        std::vector<double> days, lai, lcc;
        for (const auto& rec : px.records) {
            if (!days.empty() && !(static_cast<double>(rec.date) > days.back()))
                throw InsufficientDataError("build_patches: observation dates must be distinct and ascending");
            const VIPair v = compute_vi(rec, cfg);
            days.push_back(static_cast<double>(rec.date));
            lai.push_back(v.vi_lai);
            lcc.push_back(v.vi_lcc);
        }
        std::vector<double> lai_u(spec.steps), lcc_u(spec.steps);
        for (std::size_t t = 0; t < spec.steps; ++t) {
            lai_u[t] = interpolate_series(days, lai, grid.day(t));
            lcc_u[t] = interpolate_series(days, lcc, grid.day(t));
        }
        dense[{px.row, px.col}] = {std::move(lai_u), std::move(lcc_u)};
        rmin = std::min(rmin, px.row);
        rmax = std::max(rmax, px.row);
        cmin = std::min(cmin, px.col);
        cmax = std::max(cmax, px.col);
    }

    const long long half = static_cast<long long>(spec.k / 2);
    std::vector<LocatedPatch> out;
    out.reserve(dense.size());
    for (const auto& [key, centre] : dense) {
        AgentPatch patch(spec.k, spec.steps);
        for (std::size_t i = 0; i < spec.k; ++i)
            for (std::size_t j = 0; j < spec.k; ++j) {
                const long long r = std::clamp(key.first + static_cast<long long>(i) - half, rmin, rmax);
                const long long c = std::clamp(key.second + static_cast<long long>(j) - half, cmin, cmax);
                const auto it = dense.find({r, c});
                const auto& src = it != dense.end() ? it->second : centre;
                const std::size_t p = i * spec.k + j;
                patch.set_series(p, Channel::LAI, src.first);
                patch.set_series(p, Channel::LCC, src.second);
            }
        out.push_back({key.first, key.second, std::move(patch)});
    }
    return out;
}

} // namespace ffcdnn::vi

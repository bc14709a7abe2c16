#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "ffcdnn/error.hpp"

namespace ffcdnn::eval {

/// R^2 of the least-squares line severity ~ a + b * component, clamped to
/// [0, 1]. A constant component explains nothing and scores 0.
inline double r2_single(std::span<const double> component, std::span<const double> severity) {
    const std::size_t n = severity.size();
    if (component.size() != n) throw InvalidArgument("r2: length mismatch");
    if (n < 3) throw InvalidArgument("r2: need at least 3 samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += component[i];
        my += severity[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = component[i] - mx, dy = severity[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(syy > 0.0)) throw InvalidArgument("r2: severity has zero variance");
    if (!(sxx > 0.0)) return 0.0;
    return std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
}

/// One R^2 per column of a row-major samples x components block.
inline std::vector<double> r2_by_component(std::span<const double> features, std::size_t components,
                                           std::span<const double> severity) {
    const std::size_t n = severity.size();
    if (components == 0 || features.size() != n * components) throw InvalidArgument("r2: feature block shape mismatch");
    std::vector<double> out(components), col(n);
    for (std::size_t c = 0; c < components; ++c) {
        for (std::size_t i = 0; i < n; ++i) col[i] = features[i * components + c];
        out[c] = r2_single(col, severity);
    }
    return out;
}

} // namespace ffcdnn::eval

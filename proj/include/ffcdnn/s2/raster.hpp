#pragma once

#include <cstddef>
#include <vector>

#include "ffcdnn/error.hpp"

namespace ffcdnn::s2 {

struct Raster {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values; // row-major

    Raster() = default;
    Raster(std::size_t r, std::size_t c, std::vector<double> v) : rows(r), cols(c), values(std::move(v)) {
        if (values.size() != rows * cols) throw InvalidArgument("raster: dimensions do not match value count");
    }

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    bool operator==(const Raster&) const = default;
};

/// Nearest-neighbour upsampling: each input cell fills a factor x factor block.
/// Used to bring the 20 m red-edge bands onto the 10 m grid (factor 2).
inline Raster resample_nearest(const Raster& in, std::size_t factor = 2) {
    if (in.rows == 0 || in.cols == 0) throw InvalidArgument("resample_nearest: empty raster");
    if (factor == 0) throw InvalidArgument("resample_nearest: factor must be positive");
    Raster out;
    out.rows = in.rows * factor;
    out.cols = in.cols * factor;
    out.values.resize(out.rows * out.cols);
    for (std::size_t r = 0; r < out.rows; ++r)
        for (std::size_t c = 0; c < out.cols; ++c) out.values[r * out.cols + c] = in.at(r / factor, c / factor);
    return out;
}

} // namespace ffcdnn::s2

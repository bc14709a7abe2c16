#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/numerics/tensor.hpp"

namespace ffcdnn::capsule {

/// Per-channel standardization followed by a learnable affine map
/// (scale, shift). Training mode uses batch statistics and updates running
/// estimates (the first update copies the batch statistics, later ones blend
/// with `momentum`); inference uses the running estimates. A zero-variance channel
/// is stabilized by sigma = sqrt(var + eps^2), eps = 1e-8.
class FeatureNorm {
public:
    static constexpr double kEps = 1e-8;

    FeatureNorm() = default;
    explicit FeatureNorm(std::size_t channels, double momentum = 0.1)
        : channels_(channels), momentum_(momentum), scale(Tensor::filled({channels}, 1.0)), shift({channels}),
          running_mean({channels}), running_var(Tensor::filled({channels}, 1.0)) {}

    std::size_t channels() const noexcept { return channels_; }

    struct Cache {
        bool valid = false;
        std::size_t batch = 0;
        std::vector<double> xhat;  // batch x channels
        std::vector<double> sigma; // per channel
    };

    /// `x` is batch x channels row-major; returns same layout.
    std::vector<double> forward_train(std::span<const double> x, std::size_t batch, Cache& cache,
                                      bool update_running = true) {
        check(x, batch);
        if (batch == 0) throw InvalidArgument("feature norm: empty batch");
        const std::size_t c = channels_;
        cache.batch = batch;
        cache.xhat.assign(batch * c, 0.0);
        cache.sigma.assign(c, 0.0);
        std::vector<double> out(batch * c);
        for (std::size_t ch = 0; ch < c; ++ch) {
            double mean = 0.0;
            for (std::size_t b = 0; b < batch; ++b) mean += x[b * c + ch];
            mean /= static_cast<double>(batch);
            double var = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const double d = x[b * c + ch] - mean;
                var += d * d;
            }
            var /= static_cast<double>(batch);
            const double sigma = std::sqrt(var + kEps * kEps);
            cache.sigma[ch] = sigma;
            for (std::size_t b = 0; b < batch; ++b) {
                const double xh = (x[b * c + ch] - mean) / sigma;
                cache.xhat[b * c + ch] = xh;
                out[b * c + ch] = scale[ch] * xh + shift[ch];
            }
            if (update_running) {
                const double m = primed_ ? momentum_ : 1.0;
                running_mean[ch] = (1.0 - m) * running_mean[ch] + m * mean;
                running_var[ch] = (1.0 - m) * running_var[ch] + m * var;
            }
        }
        if (update_running) primed_ = true;
        cache.valid = true;
        return out;
    }

    /// Single sample (or any batch) with running statistics.
    std::vector<double> forward_infer(std::span<const double> x) const {
        if (x.size() % channels_ != 0) throw InvalidArgument("feature norm: input size mismatch");
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::size_t ch = i % channels_;
            const double sigma = std::sqrt(running_var[ch] + kEps * kEps);
            out[i] = scale[ch] * (x[i] - running_mean[ch]) / sigma + shift[ch];
        }
        return out;
    }

    /// Returns dx; accumulates dscale/dshift (each sized `channels`).
    std::vector<double> backward(const Cache& cache, std::span<const double> dout, std::span<double> dscale,
                                 std::span<double> dshift) const {
        if (!cache.valid) throw StateError("feature norm: backward before forward");
        const std::size_t batch = cache.batch;
        const std::size_t c = channels_;
        if (dout.size() != batch * c) throw InvalidArgument("feature norm: gradient size mismatch");
        std::vector<double> dx(batch * c);
        const double inv_b = 1.0 / static_cast<double>(batch);
        for (std::size_t ch = 0; ch < c; ++ch) {
            double sum_d = 0.0;
            double sum_dx = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const double g = dout[b * c + ch];
                dshift[ch] += g;
                dscale[ch] += g * cache.xhat[b * c + ch];
                const double dxh = g * scale[ch];
                sum_d += dxh;
                sum_dx += dxh * cache.xhat[b * c + ch];
            }
            const double mean_d = sum_d * inv_b;
            const double mean_dx = sum_dx * inv_b;
            for (std::size_t b = 0; b < batch; ++b) {
                const double dxh = dout[b * c + ch] * scale[ch];
                dx[b * c + ch] = (dxh - mean_d - cache.xhat[b * c + ch] * mean_dx) / cache.sigma[ch];
            }
        }
        return dx;
    }

private:
    void check(std::span<const double> x, std::size_t batch) const {
        if (x.size() != batch * channels_) throw InvalidArgument("feature norm: input size mismatch");
    }

    std::size_t channels_ = 0;
    double momentum_ = 0.1;
    bool primed_ = false;

public:
    Tensor scale;
    Tensor shift;
    Tensor running_mean;
    Tensor running_var;
};

} // namespace ffcdnn::capsule

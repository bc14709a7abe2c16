#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/numerics/dft.hpp"
#include "ffcdnn/numerics/tensor.hpp"
#include "ffcdnn/rng.hpp"

namespace ffcdnn::ffc {

/// Inclusive range of DFT bins (indices into 0..K1/2).
struct BandMask {
    std::size_t low_bin = 2;
    std::size_t high_bin = 15;

    std::size_t width() const noexcept { return high_bin - low_bin + 1; }
    bool contains(std::size_t j) const noexcept { return j >= low_bin && j <= high_bin; }
    bool operator==(const BandMask&) const = default;
};

/// One Fourier-pool band, inclusive bin range.
struct PoolBand {
    std::size_t low = 0;
    std::size_t high = 0;
    bool operator==(const PoolBand&) const = default;
};

using PoolBands = std::vector<PoolBand>;

inline PoolBands single_bin_bands(const BandMask& mask) {
    PoolBands out;
    for (std::size_t j = mask.low_bin; j <= mask.high_bin; ++j) out.push_back({j, j});
    return out;
}

/// Throws unless `mask` fits 0..steps/2 and `bands` tile it contiguously in order.
inline void validate_bands(std::size_t steps, const BandMask& mask, const PoolBands& bands) {
    if (steps < 2 || steps % 2 != 0) throw InvalidArgument("ffc: K1 must be even");
    if (mask.low_bin > mask.high_bin || mask.high_bin > steps / 2)
        throw InvalidArgument("ffc: band mask [" + std::to_string(mask.low_bin) + "," + std::to_string(mask.high_bin) +
                              "] outside bins 0.." + std::to_string(steps / 2));
    if (bands.empty()) throw InvalidArgument("ffc: no pool bands");
    std::size_t next = mask.low_bin;
    for (const auto& b : bands) {
        if (b.low > b.high) throw InvalidArgument("ffc: empty pool band");
        if (b.low != next) throw InvalidArgument("ffc: pool bands must partition the mask contiguously");
        next = b.high + 1;
    }
    if (next != mask.high_bin + 1) throw InvalidArgument("ffc: pool bands do not cover the mask");
}

/// Complex point-wise weights and real biases, one per (pixel, bin) for bins
/// 0..K1/2. Used for gradients too, with the same layout.
struct FourierKernel {
    std::size_t pixels = 0;
    std::size_t bins = 0;
    Tensor re;
    Tensor im;
    Tensor bias;

    FourierKernel() = default;
    FourierKernel(std::size_t pixels_, std::size_t bins_)
        : pixels(pixels_), bins(bins_), re({pixels_, bins_}), im({pixels_, bins_}), bias({pixels_, bins_}) {}

    Complex weight(std::size_t p, std::size_t j) const { return {re[p * bins + j], im[p * bins + j]}; }

    /// All-ones weights, zero bias.
    static FourierKernel ones(std::size_t pixels, std::size_t bins) {
        FourierKernel k(pixels, bins);
        k.re.fill(1.0);
        return k;
    }

    /// Unit magnitude, uniform phase in (-pi, pi], zero bias.
    static FourierKernel random_phase(std::size_t pixels, std::size_t bins, Rng& rng) {
        FourierKernel k(pixels, bins);
        for (std::size_t i = 0; i < pixels * bins; ++i) {
            const double phase = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform();
            k.re[i] = std::cos(phase);
            k.im[i] = std::sin(phase);
        }
        return k;
    }
};

/// Pooled, non-negative features of one branch: value (p, b) at p * K2 + b.
struct FFCFeatures {
    std::size_t pixels = 0;
    PoolBands bands;
    std::vector<double> values;

    std::size_t channels() const noexcept { return bands.size(); }
    double at(std::size_t p, std::size_t b) const { return values[p * bands.size() + b]; }
};

/// Forward intermediates needed by backward.
struct FFCCache {
    bool valid = false;
    std::vector<Complex> x;        // pixel x masked bin: DFT of input
    std::vector<Complex> z;        // x * W
    std::vector<double> pre;       // |z| + bias
    std::vector<std::size_t> arg;  // pixel x band: winning bin offset within the mask
};

/// Temporal Fourier convolution for one branch. Per pixel: DFT along time,
/// point-wise complex weight per in-mask bin, ReLU(|X W| + b), then max over
/// each pool band (lowest bin wins ties). Bins outside the mask contribute
/// nothing.
class FourierConv {
public:
    FourierConv(std::size_t pixels, std::size_t steps, BandMask mask, PoolBands bands)
        : pixels_(pixels), steps_(steps), mask_(mask), bands_(std::move(bands)), plan_(steps) {
        validate_bands(steps, mask_, bands_);
        const std::size_t w = mask_.width();
        cos_.resize(w * steps_);
        sin_.resize(w * steps_);
        for (std::size_t jj = 0; jj < w; ++jj) {
            const std::size_t j = mask_.low_bin + jj;
            for (std::size_t t = 0; t < steps_; ++t) {
                const double ang = 2.0 * std::numbers::pi * static_cast<double>((j * t) % steps_) / static_cast<double>(steps_);
                cos_[jj * steps_ + t] = std::cos(ang);
                sin_[jj * steps_ + t] = std::sin(ang);
            }
        }
    }

    std::size_t pixels() const noexcept { return pixels_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t bins() const noexcept { return steps_ / 2 + 1; }
    std::size_t channels() const noexcept { return bands_.size(); }
    const BandMask& mask() const noexcept { return mask_; }
    const PoolBands& bands() const noexcept { return bands_; }

    /// `input` is pixels x K1 (row-major by pixel).
    FFCFeatures forward(std::span<const double> input, const FourierKernel& kernel, FFCCache* cache = nullptr) const {
        check_kernel(kernel);
        if (input.size() != pixels_ * steps_) throw InvalidArgument("ffc: input size mismatch");
        const std::size_t w = mask_.width();
        const std::size_t k2 = bands_.size();
        FFCCache local;
        FFCCache& c = cache ? *cache : local;
        c.x.assign(pixels_ * w, Complex{});
        c.z.assign(pixels_ * w, Complex{});
        c.pre.assign(pixels_ * w, 0.0);
        c.arg.assign(pixels_ * k2, 0);

        FFCFeatures out{pixels_, bands_, std::vector<double>(pixels_ * k2, 0.0)};
        for (std::size_t p = 0; p < pixels_; ++p) {
            const Spectrum s = plan_.forward(input.subspan(p * steps_, steps_));
            for (std::size_t jj = 0; jj < w; ++jj) {
                const std::size_t j = mask_.low_bin + jj;
                const Complex xz = s.bins[j];
                const Complex zz = xz * kernel.weight(p, j);
                c.x[p * w + jj] = xz;
                c.z[p * w + jj] = zz;
                c.pre[p * w + jj] = std::abs(zz) + kernel.bias[p * kernel.bins + j];
            }
            for (std::size_t b = 0; b < k2; ++b) {
                std::size_t best = bands_[b].low - mask_.low_bin;
                double best_v = relu(c.pre[p * w + best]);
                for (std::size_t j = bands_[b].low + 1; j <= bands_[b].high; ++j) {
                    const std::size_t jj = j - mask_.low_bin;
                    const double v = relu(c.pre[p * w + jj]);
                    if (v > best_v) {
                        best_v = v;
                        best = jj;
                    }
                }
                c.arg[p * k2 + b] = best;
                out.values[p * k2 + b] = best_v;
            }
        }
        c.valid = true;
        return out;
    }

    /// Accumulates into `grad` (same layout as the kernel) and `dinput`
    /// (pixels x K1, may be empty to skip). Gradient flows only to each band's
    /// winning bin; |z| has zero gradient at z = 0.
    void backward(const FFCCache& cache, std::span<const double> dfeatures, const FourierKernel& kernel,
                  FourierKernel& grad, std::span<double> dinput) const {
        if (!cache.valid) throw StateError("ffc: backward called before forward");
        check_kernel(kernel);
        const std::size_t w = mask_.width();
        const std::size_t k2 = bands_.size();
        if (dfeatures.size() != pixels_ * k2) throw InvalidArgument("ffc: upstream gradient size mismatch");
        if (grad.pixels != pixels_ || grad.bins != bins()) throw InvalidArgument("ffc: gradient buffer shape mismatch");
        if (!dinput.empty() && dinput.size() != pixels_ * steps_) throw InvalidArgument("ffc: input gradient size mismatch");

        std::vector<Complex> gx(w);
        const double inv_n = 1.0 / static_cast<double>(steps_);
        for (std::size_t p = 0; p < pixels_; ++p) {
            std::fill(gx.begin(), gx.end(), Complex{});
            bool any = false;
            for (std::size_t b = 0; b < k2; ++b) {
                const double g = dfeatures[p * k2 + b];
                if (g == 0.0) continue;
                const std::size_t jj = cache.arg[p * k2 + b];
                if (!(cache.pre[p * w + jj] > 0.0)) continue;
                const std::size_t j = mask_.low_bin + jj;
                grad.bias[p * grad.bins + j] += g;
                const Complex z = cache.z[p * w + jj];
                const double mag = std::abs(z);
                if (mag == 0.0) continue;
                const Complex gz = g * z / mag;
                const Complex gw = gz * std::conj(cache.x[p * w + jj]);
                grad.re[p * grad.bins + j] += gw.real();
                grad.im[p * grad.bins + j] += gw.imag();
                gx[jj] += gz * std::conj(kernel.weight(p, j));
                any = true;
            }
            if (dinput.empty() || !any) continue;
            // d x[t] = (1/N) sum_j Re(G_j exp(+2 pi i j t / N))
            for (std::size_t jj = 0; jj < w; ++jj) {
                if (gx[jj] == Complex{}) continue;
                const double gr = gx[jj].real() * inv_n;
                const double gi = gx[jj].imag() * inv_n;
                const double* cs = &cos_[jj * steps_];
                const double* sn = &sin_[jj * steps_];
                double* dx = &dinput[p * steps_];
                for (std::size_t t = 0; t < steps_; ++t) dx[t] += gr * cs[t] - gi * sn[t];
            }
        }
    }

private:
    static double relu(double v) noexcept { return v > 0.0 ? v : 0.0; }

    void check_kernel(const FourierKernel& k) const {
        if (k.pixels != pixels_ || k.bins != bins()) throw InvalidArgument("ffc: kernel shape mismatch");
    }

    std::size_t pixels_;
    std::size_t steps_;
    BandMask mask_;
    PoolBands bands_;
    DftPlan plan_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

} // namespace ffcdnn::ffc

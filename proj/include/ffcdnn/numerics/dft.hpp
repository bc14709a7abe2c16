#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "ffcdnn/error.hpp"

namespace ffcdnn {

using Complex = std::complex<double>;

/// Frequency bins of a length-N sequence. With `forward_normalized` the
/// forward transform carried the 1/N factor and the inverse is unnormalized.
struct Spectrum {
    std::vector<Complex> bins;
    bool forward_normalized = true;

    std::size_t size() const noexcept { return bins.size(); }
    const Complex& operator[](std::size_t j) const { return bins[j]; }
    Complex& operator[](std::size_t j) { return bins[j]; }
};

namespace detail {

/// In-place iterative radix-2 FFT, unnormalized. `sign` = -1 forward, +1 inverse.
inline void fft_pow2(std::vector<Complex>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::size_t half = len / 2;
        std::vector<Complex> tw(half);
        for (std::size_t k = 0; k < half; ++k) tw[k] = std::polar(1.0, ang * static_cast<double>(k));
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + half] * tw[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

} // namespace detail

/// Precomputed transform for one length. Powers of two use radix-2 directly;
/// every other length goes through Bluestein's chirp-z identity, so the
/// result is the exact length-N DFT (no zero padding of the signal).
class DftPlan {
public:
    explicit DftPlan(std::size_t n) : n_(n) {
        if (n == 0) throw InvalidArgument("dft: empty input");
        pow2_ = std::has_single_bit(n);
        if (pow2_) return;
        m_ = std::bit_ceil(2 * n - 1);
        chirp_.resize(n);
        // exp(-i*pi*j^2/n); j^2 reduced mod 2n keeps the angle small.
        const std::size_t two_n = 2 * n;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t q = (j * j) % two_n;
            chirp_[j] = std::polar(1.0, -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n));
        }
        kernel_fft_.assign(m_, Complex{});
        kernel_fft_[0] = std::conj(chirp_[0]);
        for (std::size_t j = 1; j < n; ++j) {
            kernel_fft_[j] = std::conj(chirp_[j]);
            kernel_fft_[m_ - j] = std::conj(chirp_[j]);
        }
        detail::fft_pow2(kernel_fft_, -1);
    }

    std::size_t size() const noexcept { return n_; }

    /// Unnormalized transform of complex input; sign -1 forward, +1 inverse.
    std::vector<Complex> transform(std::span<const Complex> x, int sign) const {
        if (x.size() != n_) throw InvalidArgument("dft: plan length mismatch");
        std::vector<Complex> out(x.begin(), x.end());
        if (pow2_) {
            detail::fft_pow2(out, sign);
            return out;
        }
        // The inverse is the conjugate of the forward transform of the conjugate.
        const bool inverse = sign > 0;
        std::vector<Complex> a(m_, Complex{});
        for (std::size_t j = 0; j < n_; ++j) {
            const Complex v = inverse ? std::conj(x[j]) : x[j];
            a[j] = v * chirp_[j];
        }
        detail::fft_pow2(a, -1);
        for (std::size_t j = 0; j < m_; ++j) a[j] *= kernel_fft_[j];
        detail::fft_pow2(a, +1);
        const double inv_m = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) {
            const Complex v = a[k] * inv_m * chirp_[k];
            out[k] = inverse ? std::conj(v) : v;
        }
        return out;
    }

    /// Forward transform with the 1/N factor.
    Spectrum forward(std::span<const double> signal) const {
        std::vector<Complex> x(signal.begin(), signal.end());
        Spectrum s{transform(x, -1), true};
        const double inv_n = 1.0 / static_cast<double>(n_);
        for (auto& b : s.bins) b *= inv_n;
        return s;
    }

private:
    std::size_t n_;
    bool pow2_ = false;
    std::size_t m_ = 0;
    std::vector<Complex> chirp_;
    std::vector<Complex> kernel_fft_;
};

/// X[j] = (1/N) * sum_n x[n] exp(-2 pi i j n / N), any N >= 1.
inline Spectrum dft(std::span<const double> signal) {
    if (signal.empty()) throw InvalidArgument("dft: empty input");
    for (double v : signal)
        if (!std::isfinite(v)) throw InvalidArgument("dft: non-finite sample");
    return DftPlan(signal.size()).forward(signal);
}

/// Complex-valued inverse: x[n] = sum_j X[j] exp(+2 pi i j n / N).
inline std::vector<Complex> idft_complex(const Spectrum& spectrum) {
    if (spectrum.bins.empty()) throw InvalidArgument("idft: empty spectrum");
    auto out = DftPlan(spectrum.size()).transform(spectrum.bins, +1);
    if (!spectrum.forward_normalized) {
        const double inv_n = 1.0 / static_cast<double>(spectrum.size());
        for (auto& v : out) v *= inv_n;
    }
    return out;
}

/// Largest violation of X[N-j] == conj(X[j]), relative to the largest bin.
inline double conjugate_symmetry_error(const Spectrum& s) {
    const std::size_t n = s.size();
    double scale = 0.0;
    for (const auto& b : s.bins) scale = std::max(scale, std::abs(b));
    double worst = std::abs(s.bins[0].imag());
    for (std::size_t j = 1; j < n; ++j) worst = std::max(worst, std::abs(s.bins[n - j] - std::conj(s.bins[j])));
    return worst / std::max(scale, 1e-300);
}

/// Real inverse of a conjugate-symmetric spectrum.
inline std::vector<double> idft(const Spectrum& spectrum, double symmetry_tol = 1e-9) {
    if (spectrum.bins.empty()) throw InvalidArgument("idft: empty spectrum");
    if (conjugate_symmetry_error(spectrum) > symmetry_tol)
        throw InvalidArgument("idft: spectrum is not conjugate-symmetric; real output impossible");
    const auto c = idft_complex(spectrum);
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

} // namespace ffcdnn

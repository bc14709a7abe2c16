#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/numerics/dft.hpp"

namespace ffcdnn {

// Circular convolution under the same 1/N convention as dft():
//   (x * w)[n] = (1/N) sum_m x[m] w[(n - m) mod N]
// so that dft(x * w) == dft(x) . dft(w) holds bin by bin with no extra factor.

/// O(N^2) time-domain evaluation.
inline std::vector<double> circular_convolve_direct(std::span<const double> x, std::span<const double> w) {
    const std::size_t n = x.size();
    if (n == 0 || w.size() != n) throw InvalidArgument("circular_convolve: lengths must match and be non-zero");
    std::vector<double> out(n, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        // Split the wrap so the inner loops have no modulo.
        for (std::size_t m = 0; m <= i; ++m) acc += x[m] * w[i - m];
        for (std::size_t m = i + 1; m < n; ++m) acc += x[m] * w[n + i - m];
        out[i] = acc * inv_n;
    }
    return out;
}

/// Frequency-domain evaluation through a shared plan.
inline std::vector<double> circular_convolve_fft(const DftPlan& plan, std::span<const double> x,
                                                 std::span<const double> w) {
    const std::size_t n = plan.size();
    if (x.size() != n || w.size() != n) throw InvalidArgument("circular_convolve: lengths must match the plan");
    Spectrum xs = plan.forward(x);
    const Spectrum ws = plan.forward(w);
    for (std::size_t j = 0; j < n; ++j) xs.bins[j] *= ws.bins[j];
    const auto c = plan.transform(xs.bins, +1);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = c[j].real();
    return out;
}

inline std::vector<double> circular_convolve_fft(std::span<const double> x, std::span<const double> w) {
    if (x.empty() || w.size() != x.size()) throw InvalidArgument("circular_convolve: lengths must match and be non-zero");
    return circular_convolve_fft(DftPlan(x.size()), x, w);
}

} // namespace ffcdnn

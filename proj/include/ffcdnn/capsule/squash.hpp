#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ffcdnn::capsule {

inline double squared_norm(std::span<const double> u) {
    double s = 0.0;
    for (double v : u) s += v * v;
    return s;
}

/// Output norm for an input of norm n: n^2 / (1 + n^2).
inline double squash_length(double n) { return n * n / (1.0 + n * n); }

/// v = (|u|^2 / (1 + |u|^2)) * u / |u|, with squash(0) = 0.
inline void squash(std::span<const double> u, std::span<double> out) {
    const double n2 = squared_norm(u);
    const double n = std::sqrt(n2);
    const double g = n / (1.0 + n2); // scale applied to u
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = g * u[i];
}

inline std::vector<double> squash(std::span<const double> u) {
    std::vector<double> v(u.size());
    squash(u, v);
    return v;
}

/// du += J(u)^T dv. J = g I + (g'(n)/n) u u^T is symmetric, zero at u = 0.
inline void squash_backward(std::span<const double> u, std::span<const double> dv, std::span<double> du) {
    const double n2 = squared_norm(u);
    if (n2 == 0.0) return;
    const double n = std::sqrt(n2);
    const double g = n / (1.0 + n2);
    const double dg_over_n = (1.0 - n2) / ((1.0 + n2) * (1.0 + n2) * n);
    double udv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) udv += u[i] * dv[i];
    for (std::size_t i = 0; i < u.size(); ++i) du[i] += g * dv[i] + dg_over_n * udv * u[i];
}

} // namespace ffcdnn::capsule

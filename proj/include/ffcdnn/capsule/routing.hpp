#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ffcdnn/capsule/squash.hpp"
#include "ffcdnn/error.hpp"
#include "ffcdnn/numerics/tensor.hpp"

namespace ffcdnn::capsule {

struct RoutingShape {
    std::size_t primary = 32;   // K3
    std::size_t classes = 3;    // Z
    std::size_t primary_dim = 8;
    std::size_t class_dim = 16;

    /// Shape of the per-(i, h) transform tensor: K3 x Z x d_c x d_p.
    Shape transform_shape() const { return {primary, classes, class_dim, primary_dim}; }
};

/// Routing logits b and coupling coefficients c (K3 x Z, row-major).
/// `coupling_history` holds c for every iteration, oldest first.
struct RoutingState {
    std::vector<double> logits;
    std::vector<double> coupling;
    std::vector<std::vector<double>> coupling_history;
};

/// Z class capsules of dimension d_c, row-major.
struct ClassCapsules {
    std::size_t classes = 0;
    std::size_t dim = 0;
    std::vector<double> v;

    std::span<const double> capsule(std::size_t h) const { return std::span<const double>(v).subspan(h * dim, dim); }
    double length(std::size_t h) const { return std::sqrt(squared_norm(capsule(h))); }
};

struct RoutingCache {
    bool valid = false;
    std::vector<double> u;                  // K3 x d_p
    std::vector<double> uhat;               // K3 x Z x d_c
    std::vector<std::vector<double>> c;     // per iteration, K3 x Z
    std::vector<std::vector<double>> s;     // per iteration, Z x d_c
    std::vector<std::vector<double>> v;     // per iteration, Z x d_c
};

inline void softmax_rows(std::span<const double> b, std::span<double> c, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* bi = &b[i * cols];
        double* ci = &c[i * cols];
        const double mx = *std::max_element(bi, bi + cols);
        double sum = 0.0;
        for (std::size_t h = 0; h < cols; ++h) {
            ci[h] = std::exp(bi[h] - mx);
            sum += ci[h];
        }
        for (std::size_t h = 0; h < cols; ++h) ci[h] /= sum;
    }
}

/// Agreement routing. u_hat(h|i) = T(i,h) u_i; b = 0; each iteration:
/// c = softmax_h(b), s_h = sum_i c(i,h) u_hat(h|i), V_h = squash(s_h),
/// b(i,h) += <u_hat(h|i), V_h>. Returns the last V.
inline ClassCapsules route(std::span<const double> u, const Tensor& transforms, const RoutingShape& shape,
                           std::size_t iterations, RoutingState* state = nullptr, RoutingCache* cache = nullptr) {
    if (iterations < 1) throw InvalidArgument("route: iterations must be >= 1");
    const std::size_t n = shape.primary, z = shape.classes, dp = shape.primary_dim, dc = shape.class_dim;
    if (u.size() != n * dp) throw InvalidArgument("route: primary capsule size mismatch");
    if (transforms.shape() != shape.transform_shape()) throw InvalidArgument("route: transform shape mismatch");

    std::vector<double> uhat(n * z * dc, 0.0);
    const double* T = transforms.data();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t h = 0; h < z; ++h) {
            const double* Tih = T + ((i * z + h) * dc) * dp;
            double* out = &uhat[(i * z + h) * dc];
            const double* ui = &u[i * dp];
            for (std::size_t r = 0; r < dc; ++r) {
                double acc = 0.0;
                for (std::size_t q = 0; q < dp; ++q) acc += Tih[r * dp + q] * ui[q];
                out[r] = acc;
            }
        }

    std::vector<double> b(n * z, 0.0), c(n * z), s(z * dc), v(z * dc);
    if (cache) {
        cache->u.assign(u.begin(), u.end());
        cache->c.clear();
        cache->s.clear();
        cache->v.clear();
    }
    if (state) state->coupling_history.clear();
    for (std::size_t it = 0; it < iterations; ++it) {
        softmax_rows(b, c, n, z);
        std::fill(s.begin(), s.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t h = 0; h < z; ++h) {
                const double cih = c[i * z + h];
                const double* uh = &uhat[(i * z + h) * dc];
                for (std::size_t r = 0; r < dc; ++r) s[h * dc + r] += cih * uh[r];
            }
        for (std::size_t h = 0; h < z; ++h)
            squash(std::span<const double>(s).subspan(h * dc, dc), std::span<double>(v).subspan(h * dc, dc));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t h = 0; h < z; ++h) {
                const double* uh = &uhat[(i * z + h) * dc];
                double dot = 0.0;
                for (std::size_t r = 0; r < dc; ++r) dot += uh[r] * v[h * dc + r];
                b[i * z + h] += dot;
            }
        if (cache) {
            cache->c.push_back(c);
            cache->s.push_back(s);
            cache->v.push_back(v);
        }
        if (state) state->coupling_history.push_back(c);
    }
    if (state) {
        state->logits = b;
        state->coupling = c;
    }
    if (cache) {
        cache->uhat = std::move(uhat);
        cache->valid = true;
    }
    return {z, dc, v};
}

/// Backward through the unrolled iterations, including the dependence of the
/// coupling coefficients on earlier agreements. Accumulates into dtransforms
/// (same shape as transforms) and du (K3 x d_p).
inline void route_backward(const RoutingCache& cache, std::span<const double> dv, const Tensor& transforms,
                           const RoutingShape& shape, Tensor& dtransforms, std::span<double> du) {
    if (!cache.valid) throw StateError("route: backward before forward");
    const std::size_t n = shape.primary, z = shape.classes, dp = shape.primary_dim, dc = shape.class_dim;
    const std::size_t iters = cache.v.size();
    if (dv.size() != z * dc) throw InvalidArgument("route: upstream gradient size mismatch");

    std::vector<double> duhat(n * z * dc, 0.0);
    std::vector<double> db_next(n * z, 0.0); // gradient w.r.t. b entering iteration t+1
    std::vector<double> dV(z * dc), ds(z * dc), dc_(n * z), db(n * z);
    for (std::size_t t = iters; t-- > 0;) {
        const auto& c = cache.c[t];
        const auto& s = cache.s[t];
        const auto& v = cache.v[t];
        // V_t feeds the output (last iteration) and the logit update b_{t+1}.
        if (t + 1 == iters) std::copy(dv.begin(), dv.end(), dV.begin());
        else std::fill(dV.begin(), dV.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t h = 0; h < z; ++h) {
                const double g = db_next[i * z + h];
                if (g == 0.0) continue;
                const double* uh = &cache.uhat[(i * z + h) * dc];
                double* duh = &duhat[(i * z + h) * dc];
                for (std::size_t r = 0; r < dc; ++r) {
                    dV[h * dc + r] += g * uh[r];
                    duh[r] += g * v[h * dc + r];
                }
            }
        std::fill(ds.begin(), ds.end(), 0.0);
        for (std::size_t h = 0; h < z; ++h)
            squash_backward(std::span<const double>(s).subspan(h * dc, dc), std::span<const double>(dV).subspan(h * dc, dc),
                            std::span<double>(ds).subspan(h * dc, dc));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t h = 0; h < z; ++h) {
                const double cih = c[i * z + h];
                const double* uh = &cache.uhat[(i * z + h) * dc];
                double* duh = &duhat[(i * z + h) * dc];
                double dot = 0.0;
                for (std::size_t r = 0; r < dc; ++r) {
                    duh[r] += cih * ds[h * dc + r];
                    dot += ds[h * dc + r] * uh[r];
                }
                dc_[i * z + h] = dot;
            }
        // b_{t+1} = b_t + agreement, so db_t = db_{t+1} + softmax adjoint.
        for (std::size_t i = 0; i < n; ++i) {
            double inner = 0.0;
            for (std::size_t h = 0; h < z; ++h) inner += c[i * z + h] * dc_[i * z + h];
            for (std::size_t h = 0; h < z; ++h)
                db[i * z + h] = db_next[i * z + h] + c[i * z + h] * (dc_[i * z + h] - inner);
        }
        std::swap(db, db_next);
    }

    const double* T = transforms.data();
    double* dT = dtransforms.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* ui = &cache.u[i * dp];
        for (std::size_t h = 0; h < z; ++h) {
            const std::size_t base = ((i * z + h) * dc) * dp;
            const double* duh = &duhat[(i * z + h) * dc];
            for (std::size_t r = 0; r < dc; ++r) {
                const double g = duh[r];
                if (g == 0.0) continue;
                for (std::size_t q = 0; q < dp; ++q) {
                    dT[base + r * dp + q] += g * ui[q];
                    if (!du.empty()) du[i * dp + q] += T[base + r * dp + q] * g;
                }
            }
        }
    }
}

} // namespace ffcdnn::capsule

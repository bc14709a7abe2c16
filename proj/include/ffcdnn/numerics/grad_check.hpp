#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/numerics/tensor.hpp"

namespace ffcdnn {

/// A scalar-valued function together with its analytic gradient.
struct Differentiable {
    std::function<double(const Tensor&)> value;
    std::function<Tensor(const Tensor&)> gradient;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
};

inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

/// Central-difference check of op.gradient against op.value at `input`.
/// `components` restricts the comparison to a subset of indices (all when
/// empty). A component whose difference quotient keeps growing as eps shrinks
/// is reported as a non-differentiable point instead of a plain mismatch.
inline GradCheckResult grad_check_detailed(const Differentiable& op, const Tensor& input, double eps,
                                           std::span<const std::size_t> components = {},
                                           double mismatch_tol = 1e-4) {
    if (!(eps > 0.0 && eps <= 1e-2)) throw InvalidArgument("grad_check: eps must be in (0, 1e-2]");
    const Tensor analytic = op.gradient(input);
    if (analytic.shape() != input.shape()) throw InvalidArgument("grad_check: gradient shape differs from input");

    std::vector<std::size_t> all;
    if (components.empty()) {
        all.resize(input.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        components = all;
    }

    Tensor probe = input;
    auto central = [&](std::size_t i, double h) {
        const double orig = probe[i];
        probe[i] = orig + h;
        const double fp = op.value(probe);
        probe[i] = orig - h;
        const double fm = op.value(probe);
        probe[i] = orig;
        return (fp - fm) / (2.0 * h);
    };

    GradCheckResult res;
    for (std::size_t i : components) {
        const double numeric = central(i, eps);
        const double err = relative_error(analytic[i], numeric);
        if (err > mismatch_tol) {
            const double q1 = std::abs(central(i, eps / 10.0));
            const double q2 = std::abs(central(i, eps / 100.0));
            const double q0 = std::max(std::abs(numeric), 1e-12);
            if (q1 > 4.0 * q0 && q2 > 4.0 * q1)
                throw NonDifferentiableError("grad_check: difference quotient diverges at component " +
                                             std::to_string(i));
        }
        if (err > res.max_rel_error || i == components.front()) {
            res.max_rel_error = std::max(res.max_rel_error, err);
            res.worst_index = i;
            res.analytic_at_worst = analytic[i];
            res.numeric_at_worst = numeric;
        }
    }
    return res;
}

/// Max over components of |analytic - central| / max(|analytic|, |central|, 1e-12).
inline double grad_check(const Differentiable& op, const Tensor& input, double eps,
                         std::span<const std::size_t> components = {}) {
    return grad_check_detailed(op, input, eps, components).max_rel_error;
}

} // namespace ffcdnn

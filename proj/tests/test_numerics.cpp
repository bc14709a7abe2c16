#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ffcdnn/numerics/convolution.hpp"
#include "ffcdnn/numerics/dft.hpp"
#include "ffcdnn/numerics/grad_check.hpp"
#include "ffcdnn/numerics/grad_tape.hpp"
#include "ffcdnn/numerics/tensor.hpp"
#include "ffcdnn/rng.hpp"

using namespace ffcdnn;

namespace {

// Direct double-loop transform with the 1/N forward factor.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc / static_cast<double>(n);
    }
    return out;
}

std::vector<double> naive_circular(const std::vector<double>& x, const std::vector<double>& w) {
    const std::size_t n = x.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t s = 0; s < n; ++s) out[t] += x[s] * w[(t + n - s) % n];
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

double max_abs(const std::vector<std::complex<double>>& v) {
    double m = 0;
    for (auto c : v) m = std::max(m, std::abs(c));
    return m;
}

} // namespace

TEST(Tensor, RejectsShapeMismatchAndNonFinite) {
    EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), InvalidArgument);
    EXPECT_THROW(Tensor({2}, {1.0, std::nan("")}), InvalidArgument);
    EXPECT_THROW(Tensor({1}, {INFINITY}), InvalidArgument);
}

TEST(Tensor, RowMajorIndexing) {
    Tensor t({2, 3, 4});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
    EXPECT_EQ(t.at(1, 2, 3), 23.0);
    EXPECT_EQ(t.at(0, 1, 0), 4.0);
    EXPECT_EQ(t.size(), 24u);
}

TEST(Dft, ConstantSignalIsDcOnly) {
    for (std::size_t n : {1u, 5u, 8u, 52u}) {
        const std::vector<double> x(n, 2.5);
        const auto s = dft(x);
        EXPECT_NEAR(s.bins[0].real(), 2.5, 1e-12);
        for (std::size_t j = 1; j < n; ++j) EXPECT_LT(std::abs(s.bins[j]), 1e-12);
    }
}

TEST(Dft, ImpulseIsFlat) {
    std::vector<double> x(8, 0.0);
    x[0] = 1.0;
    const auto s = dft(x);
    for (auto b : s.bins) {
        EXPECT_NEAR(b.real(), 0.125, 1e-15);
        EXPECT_NEAR(b.imag(), 0.0, 1e-15);
    }
}

TEST(Dft, MatchesNaiveOracleForAnyLength) {
    Rng rng(11);
    for (std::size_t n : {1u, 2u, 3u, 7u, 8u, 13u, 52u, 64u, 100u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto x = random_vec(rng, n);
            const auto s = dft(x);
            const auto ref = naive_dft(x);
            std::vector<std::complex<double>> diff(n);
            for (std::size_t j = 0; j < n; ++j) diff[j] = s.bins[j] - ref[j];
            EXPECT_LE(max_abs(diff) / max_abs(ref), 1e-9) << "N=" << n;
        }
    }
}

TEST(Dft, RealInputIsConjugateSymmetric) {
    Rng rng(3);
    const auto s = dft(random_vec(rng, 52));
    EXPECT_TRUE(s.forward_normalized);
    EXPECT_LT(conjugate_symmetry_error(s), 1e-14);
}

TEST(Dft, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(dft(std::vector<double>{}), InvalidArgument);
    EXPECT_THROW(dft(std::vector<double>{1.0, NAN}), InvalidArgument);
}

TEST(Idft, RoundTrip) {
    Rng rng(5);
    for (std::size_t n : {1u, 2u, 7u, 52u, 64u}) {
        const auto x = random_vec(rng, n);
        const auto y = idft(dft(x));
        ASSERT_EQ(y.size(), n);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], x[i], 1e-9 * std::max(1.0, std::abs(x[i])));
    }
}

TEST(Idft, RejectsNonSymmetricSpectrum) {
    Spectrum s;
    s.bins = {1.0, {0.0, 1.0}, 0.0, 0.0};
    EXPECT_THROW(idft(s), InvalidArgument);
    EXPECT_NO_THROW(idft_complex(s));
}

TEST(Convolution, DirectMatchesOracle) {
    Rng rng(9);
    for (std::size_t n : {1u, 4u, 13u, 52u}) {
        const auto x = random_vec(rng, n), w = random_vec(rng, n);
        const auto got = circular_convolve_direct(x, w);
        const auto ref = naive_circular(x, w);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], ref[i], 1e-12);
    }
}

TEST(Convolution, FftAgreesWithDirect) {
    Rng rng(10);
    for (std::size_t n : {2u, 52u, 64u, 97u}) {
        const auto x = random_vec(rng, n), w = random_vec(rng, n);
        const auto a = circular_convolve_fft(x, w);
        const auto b = circular_convolve_direct(x, w);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
    }
}

TEST(Convolution, TheoremHoldsWithNormalizedConvolution) {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_vec(rng, 52), w = random_vec(rng, 52);
        const auto lhs = dft(circular_convolve_direct(x, w));
        const auto xs = dft(x), ws = dft(w);
        for (std::size_t j = 0; j < 52; ++j) EXPECT_LT(std::abs(lhs.bins[j] - xs.bins[j] * ws.bins[j]), 1e-12);
    }
}

TEST(GradCheck, AcceptsCorrectGradient) {
    Differentiable op{
        [](const Tensor& x) {
            double s = 0;
            for (std::size_t i = 0; i + 1 < x.size(); ++i) s += std::sin(x[i]) * x[i + 1];
            return s;
        },
        [](const Tensor& x) {
            Tensor g(x.shape());
            for (std::size_t i = 0; i + 1 < x.size(); ++i) {
                g[i] += std::cos(x[i]) * x[i + 1];
                g[i + 1] += std::sin(x[i]);
            }
            return g;
        }};
    Rng rng(1);
    Tensor x({6});
    for (auto& v : x.values()) v = rng.normal();
    EXPECT_LE(grad_check(op, x, 1e-5), 1e-6);
}

TEST(GradCheck, FlagsWrongGradient) {
    Differentiable op{[](const Tensor& x) { return x[0] * x[0]; },
                      [](const Tensor& x) { return Tensor({1}, {3.0 * x[0]}); }};
    const auto res = grad_check_detailed(op, Tensor({1}, {1.5}), 1e-5);
    EXPECT_GT(res.max_rel_error, 0.3);
    EXPECT_NEAR(res.numeric_at_worst, 3.0, 1e-6);
    EXPECT_NEAR(res.analytic_at_worst, 4.5, 1e-12);
}

TEST(GradCheck, ReportsNonDifferentiablePoint) {
    Differentiable op{[](const Tensor& x) { return std::cbrt(x[0]); },
                      [](const Tensor&) { return Tensor({1}, {0.0}); }};
    EXPECT_THROW(grad_check(op, Tensor({1}, {0.0}), 1e-4), NonDifferentiableError);
}

TEST(GradCheck, SubsetAndEpsValidation) {
    Differentiable op{[](const Tensor& x) { return x[0] + 2.0 * x[1]; },
                      [](const Tensor&) { return Tensor({2}, {1.0, 99.0}); }};
    const std::vector<std::size_t> first{0};
    EXPECT_LE(grad_check(op, Tensor({2}, {0.1, 0.2}), 1e-5, first), 1e-8);
    EXPECT_THROW(grad_check(op, Tensor({2}), 0.0), InvalidArgument);
    EXPECT_THROW(grad_check(op, Tensor({2}), 0.5), InvalidArgument);
}

TEST(GradTape, ReplaysInReverseAndAccumulates) {
    // y = sum((a * x)^2) with a = 3: dy/dx = 18 x.
    GradTape tape;
    const auto sx = tape.watch({3});
    const Tensor x({3}, {1.0, -2.0, 0.5});
    Tensor u({3});
    for (std::size_t i = 0; i < 3; ++i) u[i] = 3.0 * x[i];
    Tensor du({3});
    std::vector<int> order;
    tape.record([&](GradTape& t) {
        order.push_back(1);
        for (std::size_t i = 0; i < 3; ++i) t.grad(sx)[i] += 3.0 * du[i];
    });
    tape.record([&](GradTape&) {
        order.push_back(2);
        for (std::size_t i = 0; i < 3; ++i) du[i] = 2.0 * u[i];
    });
    tape.backward();
    EXPECT_EQ(order, (std::vector<int>{2, 1}));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(tape.grad(sx)[i], 18.0 * x[i]);
    EXPECT_EQ(tape.grad(sx).shape(), x.shape());
    EXPECT_THROW(tape.backward(), StateError);
    EXPECT_THROW(tape.record([](GradTape&) {}), StateError);
}

TEST(Rng, DeterministicStreams) {
    Rng a(42), b(42), c(mix_seed(42, 1));
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        (void)c;
    }
    EXPECT_NE(mix_seed(42, 1), mix_seed(42, 2));
    double lo = 1, hi = 0;
    for (int i = 0; i < 10000; ++i) {
        const double u = a.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    EXPECT_GE(lo, 0.0);
    EXPECT_LT(hi, 1.0);
}

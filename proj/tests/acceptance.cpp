// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ffcdnn/capsule/normalize.hpp"
#include "ffcdnn/capsule/routing.hpp"
#include "ffcdnn/capsule/squash.hpp"
#include "ffcdnn/eval/interpret.hpp"
#include "ffcdnn/eval/metrics.hpp"
#include "ffcdnn/ffc/fourier_conv.hpp"
#include "ffcdnn/model/factory.hpp"
#include "ffcdnn/model/trainer.hpp"
#include "ffcdnn/numerics/convolution.hpp"
#include "ffcdnn/numerics/dft.hpp"
#include "ffcdnn/numerics/grad_check.hpp"
#include "ffcdnn/synth/generator.hpp"

namespace fs = std::filesystem;
using namespace ffcdnn;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kData = FFCDNN_DATA_DIR;
const std::string kCli = FFCDNN_CLI;

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
    std::printf("[%s] criterion %d %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * rng.normal();
    return v;
}

vi::AgentPatch random_patch(Rng& rng, std::size_t k, std::size_t steps) {
    vi::AgentPatch p(k, steps);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t t = 0; t < steps; ++t) {
                p.at(r, c, t, vi::Channel::LAI) = rng.normal(1.0, 0.5);
                p.at(r, c, t, vi::Channel::LCC) = rng.normal(0.2, 0.1);
            }
    return p;
}

// ------------------------------------------------------------------ 1

void metric_fidelity() {
    const auto t0 = Clock::now();
    const std::string tables = kData + "/fixtures/tables/";
    const std::vector<std::string> named{"table2_ffcdnn_train", "table2_ffcdnn_val", "table2_cnn_train",
                                         "table3_ffcdnn_ningqiang", "table3_ffcdnn_shunyi"};
    std::ifstream in(tables + "published.csv");
    std::string line;
    std::getline(in, line);
    std::size_t checked = 0, bad = 0;
    std::string worst;
    std::map<std::string, eval::MetricReport> reports;
    for (const auto& m : named) reports[m] = eval::confusion_metrics(eval::load_matrix_csv(tables + m + ".csv"));
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string matrix, metric, cls, value;
        std::getline(ss, matrix, ',');
        std::getline(ss, metric, ',');
        std::getline(ss, cls, ',');
        std::getline(ss, value, ',');
        if (!reports.count(matrix) || metric == "CT") continue;
        const auto& r = reports[matrix];
        double got = 0, tol = 0.05;
        if (metric == "OA") got = r.oa;
        else if (metric == "Kappa") {
            got = r.kappa.value_or(NAN);
            tol = 0.001;
        } else {
            const auto idx = index_of(parse_class(cls));
            got = (metric == "UA" ? r.ua[idx] : r.pa[idx]).value_or(NAN);
        }
        ++checked;
        if (!(std::abs(got - std::stod(value)) <= tol + 1e-9)) {
            ++bad;
            worst += " " + matrix + "/" + metric + "/" + cls;
        }
    }
    const double secs = since(t0);
    report(1, "metric fidelity", bad == 0 && checked == named.size() * 8 && secs < 1.0,
           fmt("%zu/%zu printed OA/Kappa/UA/PA values within 0.05 pp / 0.001%s", checked - bad, checked, worst.c_str()), secs);
}

// ------------------------------------------------------------------ 2

void dft_oracle() {
    const auto t0 = Clock::now();
    Rng rng(mix_seed(100, 2));
    double worst = 0, worst_rt = 0;
    for (std::size_t n : {1u, 2u, 3u, 7u, 8u, 13u, 52u, 64u})
        for (int trial = 0; trial < 100; ++trial) {
            const auto x = random_vec(rng, n);
            const auto s = dft(x);
            double err = 0, scale = 0;
            for (std::size_t k = 0; k < n; ++k) {
                std::complex<double> acc = 0.0;
                for (std::size_t t = 0; t < n; ++t)
                    acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n));
                acc /= static_cast<double>(n);
                err = std::max(err, std::abs(s.bins[k] - acc));
                scale = std::max(scale, std::abs(acc));
            }
            worst = std::max(worst, err / scale);
            const auto y = idft(s);
            for (std::size_t i = 0; i < n; ++i) worst_rt = std::max(worst_rt, std::abs(y[i] - x[i]) / std::max(1.0, std::abs(x[i])));
        }
    report(2, "DFT oracle equivalence", worst <= 1e-9 && worst_rt <= 1e-9,
           fmt("max relative error %.2e, round-trip %.2e over 800 inputs", worst, worst_rt), since(t0));
}

// ------------------------------------------------------------------ 3

void convolution_theorem() {
    const auto t0 = Clock::now();
    Rng rng(mix_seed(100, 3));
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 8 + rng.index(120);
        const auto x = random_vec(rng, n);
        // W from a real kernel so idft(W) is real.
        const Spectrum W = dft(random_vec(rng, n));
        const auto w = idft(W);
        const auto X = dft(x);
        const auto C = dft(circular_convolve_direct(x, w));
        for (std::size_t j = 0; j < n; ++j) {
            const double a = std::abs(X.bins[j] * W.bins[j]), b = std::abs(C.bins[j]);
            worst = std::max(worst, std::abs(a - b));
        }
    }
    report(3, "convolution theorem", worst <= 1e-9, fmt("max | |XW| - |dft(x*w)| | = %.2e over 100 instances", worst), since(t0));
}

// ------------------------------------------------------------------ 4

Tensor flat_grads(const std::vector<Tensor>& g, const std::vector<std::size_t>& shape) {
    Tensor out(shape);
    std::size_t off = 0;
    for (const auto& gi : g)
        for (double v : gi.values()) out[off++] = v;
    return out;
}

double check_ffc(Rng& rng) {
    const std::size_t n = 52, pixels = 3;
    const ffc::FourierConv conv(pixels, n, {2, 15}, ffc::single_bin_bands({2, 15}));
    const std::size_t kb = pixels * conv.bins();
    const auto up = random_vec(rng, pixels * 14);
    auto unpack = [&](const Tensor& t, ffc::FourierKernel& k, std::vector<double>& x) {
        k = ffc::FourierKernel(pixels, conv.bins());
        for (std::size_t i = 0; i < kb; ++i) {
            k.re[i] = t[i];
            k.im[i] = t[kb + i];
            k.bias[i] = t[2 * kb + i];
        }
        x.assign(t.values().begin() + static_cast<std::ptrdiff_t>(3 * kb), t.values().end());
    };
    Differentiable op{[&](const Tensor& t) {
                          ffc::FourierKernel k;
                          std::vector<double> x;
                          unpack(t, k, x);
                          const auto f = conv.forward(x, k);
                          double s = 0;
                          for (std::size_t i = 0; i < up.size(); ++i) s += up[i] * f.values[i];
                          return s;
                      },
                      [&](const Tensor& t) {
                          ffc::FourierKernel k;
                          std::vector<double> x;
                          unpack(t, k, x);
                          ffc::FFCCache cache;
                          conv.forward(x, k, &cache);
                          ffc::FourierKernel g(pixels, conv.bins());
                          std::vector<double> dx(x.size(), 0.0);
                          conv.backward(cache, up, k, g, dx);
                          Tensor out(t.shape());
                          for (std::size_t i = 0; i < kb; ++i) {
                              out[i] = g.re[i];
                              out[kb + i] = g.im[i];
                              out[2 * kb + i] = g.bias[i];
                          }
                          for (std::size_t i = 0; i < dx.size(); ++i) out[3 * kb + i] = dx[i];
                          return out;
                      }};
    Tensor t({3 * kb + pixels * n});
    for (std::size_t i = 0; i < 2 * kb; ++i) t[i] = rng.normal();
    for (std::size_t i = 0; i < kb; ++i) t[2 * kb + i] = 0.5;
    for (std::size_t i = 0; i < pixels * n; ++i) t[3 * kb + i] = rng.normal();
    std::vector<std::size_t> comps;
    for (std::size_t p = 0; p < pixels; ++p)
        for (std::size_t j = 2; j <= 15; ++j)
            for (std::size_t part = 0; part < 3; ++part) comps.push_back(part * kb + p * conv.bins() + j);
    for (std::size_t i = 0; i < pixels * n; ++i) comps.push_back(3 * kb + i);
    return grad_check(op, t, 1e-6, comps);
}

double check_norm(Rng& rng) {
    const std::size_t batch = 6, ch = 4;
    capsule::FeatureNorm fn(ch);
    for (std::size_t c = 0; c < ch; ++c) {
        fn.scale[c] = rng.uniform(0.5, 2);
        fn.shift[c] = rng.normal();
    }
    const auto up = random_vec(rng, batch * ch);
    Differentiable op{[&](const Tensor& t) {
                          capsule::FeatureNorm copy = fn;
                          capsule::FeatureNorm::Cache c;
                          const auto y = copy.forward_train(t.values(), batch, c, false);
                          double s = 0;
                          for (std::size_t i = 0; i < y.size(); ++i) s += up[i] * y[i];
                          return s;
                      },
                      [&](const Tensor& t) {
                          capsule::FeatureNorm copy = fn;
                          capsule::FeatureNorm::Cache c;
                          copy.forward_train(t.values(), batch, c, false);
                          std::vector<double> ds(ch, 0.0), dh(ch, 0.0);
                          return Tensor(t.shape(), copy.backward(c, up, ds, dh));
                      }};
    return grad_check(op, Tensor({batch * ch}, random_vec(rng, batch * ch)), 1e-6);
}

double check_routing(Rng& rng) {
    const capsule::RoutingShape shape{4, 3, 3, 4};
    const auto dv = random_vec(rng, 12);
    const std::size_t nt = shape_size(shape.transform_shape());
    auto split = [&](const Tensor& p) {
        return Tensor(shape.transform_shape(), std::vector<double>(p.values().begin(), p.values().begin() + static_cast<std::ptrdiff_t>(nt)));
    };
    Differentiable op{[&](const Tensor& p) {
                          const auto v = capsule::route(p.values().subspan(nt), split(p), shape, 3);
                          double s = 0;
                          for (std::size_t i = 0; i < v.v.size(); ++i) s += dv[i] * v.v[i];
                          return s;
                      },
                      [&](const Tensor& p) {
                          const auto t = split(p);
                          capsule::RoutingCache cache;
                          capsule::route(p.values().subspan(nt), t, shape, 3, nullptr, &cache);
                          Tensor dt(shape.transform_shape());
                          std::vector<double> du(12, 0.0);
                          capsule::route_backward(cache, dv, t, shape, dt, du);
                          Tensor g(p.shape());
                          std::copy(dt.values().begin(), dt.values().end(), g.values().begin());
                          std::copy(du.begin(), du.end(), g.values().begin() + static_cast<std::ptrdiff_t>(nt));
                          return g;
                      }};
    return grad_check(op, Tensor({nt + 12}, random_vec(rng, nt + 12, 0.6)), 1e-6);
}

double check_classifier(Rng& rng) {
    const std::size_t y = rng.index(3);
    Differentiable op{[&](const Tensor& t) {
                          return model::margin_loss(capsule::ClassCapsules{3, 4, {t.values().begin(), t.values().end()}}, y);
                      },
                      [&](const Tensor& t) {
                          Tensor g(t.shape());
                          model::margin_loss_backward(capsule::ClassCapsules{3, 4, {t.values().begin(), t.values().end()}}, y, {},
                                                      1.0, g.values());
                          return g;
                      }};
    return grad_check(op, Tensor({12}, random_vec(rng, 12, 0.3)), 1e-7);
}

Differentiable network_loss(model::Network& net, const std::vector<const Sample*>& batch) {
    return {[&net, batch](const Tensor& t) {
                net.set_flat_parameters(t.values());
                auto g = net.zero_grads();
                return net.train_batch(batch, g, false, nullptr);
            },
            [&net, batch](const Tensor& t) {
                net.set_flat_parameters(t.values());
                auto g = net.zero_grads();
                net.train_batch(batch, g, false, nullptr);
                return flat_grads(g, t.shape());
            }};
}

double check_cnn(Rng& rng) {
    model::ModelConfig cfg;
    cfg.k = 1;
    cfg.steps = 12;
    cfg.mask = {2, 5};
    cfg.cnn_hidden = 8;
    cfg.seed = rng.next_u64();
    auto cnn = model::make_network(model::ModelKind::Cnn, cfg);
    Dataset batch;
    for (std::size_t i = 0; i < 3; ++i) batch.push_back({i, random_patch(rng, 1, 12), class_from_index(i), 0.0});
    std::vector<const Sample*> ptrs;
    for (auto& s : batch) ptrs.push_back(&s);
    const auto p0 = cnn->flat_parameters();
    std::vector<std::size_t> comps;
    for (std::size_t i = rng.index(7); i < p0.size(); i += 7) comps.push_back(i);
    for (std::size_t i = p0.size() - 3 * 8 - 3; i < p0.size(); ++i) comps.push_back(i);
    return grad_check(network_loss(*cnn, ptrs), Tensor({p0.size()}, p0), 1e-6, comps);
}

// Miniature full model. Components whose true gradient is exactly zero
// (kernel magnitudes cancelled by batch normalization) are verified
// absolutely; the returned value is the relative error over the rest.
double check_full(Rng& rng, bool& zero_ok) {
    model::ModelConfig cfg;
    cfg.k = 1;
    cfg.steps = 8;
    cfg.mask = {1, 4};
    cfg.primary_dim = 2;
    cfg.class_dim = 4;
    cfg.transform_init_std = 0.5;
    cfg.pool_bands = "1-2,3-4";
    cfg.seed = rng.next_u64();
    model::Ffcdnn net(cfg);
    for (auto& p : net.parameters()) {
        if (p.name.find("bias") != std::string::npos)
            for (auto& v : p.tensor->values()) v = rng.uniform(0.05, 0.2);
        if (p.name.find("shift") != std::string::npos)
            for (auto& v : p.tensor->values()) v = rng.normal(0.0, 0.1);
    }
    Dataset batch;
    for (std::size_t i = 0; i < 4; ++i) batch.push_back({i, random_patch(rng, 1, 8), class_from_index(i % 3), 0.0});
    std::vector<const Sample*> ptrs;
    for (auto& s : batch) ptrs.push_back(&s);
    const auto p0 = net.flat_parameters();
    const auto op = network_loss(net, ptrs);
    const Tensor x({p0.size()}, p0);
    const auto analytic = op.gradient(x);
    std::vector<std::size_t> comps;
    std::size_t off = 0;
    for (auto& p : net.parameters()) {
        const std::size_t sz = p.tensor->size();
        const bool kernel = p.name.find("lai.") == 0 || p.name.find("lcc.") == 0;
        for (std::size_t i = 0; i < sz; ++i) {
            if (kernel && !cfg.mask.contains(i % 5)) continue;
            if (std::abs(analytic[off + i]) > 1e-9) {
                comps.push_back(off + i);
                continue;
            }
            Tensor a = x, b = x;
            a[off + i] += 1e-6;
            b[off + i] -= 1e-6;
            zero_ok = zero_ok && std::abs(op.value(a) - op.value(b)) / 2e-6 <= 1e-8;
        }
        off += sz;
    }
    return grad_check(op, x, 1e-6, comps);
}

void gradient_checks() {
    const auto t0 = Clock::now();
    Rng rng(mix_seed(100, 4));
    std::vector<std::pair<std::string, std::function<double()>>> checks{
        {"ffc", [&] { return check_ffc(rng); }},
        {"norm", [&] { return check_norm(rng); }},
        {"routing", [&] { return check_routing(rng); }},
        {"classifier", [&] { return check_classifier(rng); }},
        {"cnn", [&] { return check_cnn(rng); }},
    };
    bool zero_ok = true;
    checks.emplace_back("full", [&] { return check_full(rng, zero_ok); });
    std::string detail;
    bool pass = true;
    for (auto& [name, fn] : checks) {
        double worst = 0;
        for (int point = 0; point < 5; ++point) {
            try {
                worst = std::max(worst, fn());
            } catch (const std::exception& e) {
                worst = INFINITY;
                std::fprintf(stderr, "grad check %s: %s\n", name.c_str(), e.what());
            }
        }
        pass = pass && worst <= 1e-4;
        detail += fmt("%s %.1e, ", name.c_str(), worst);
    }
    pass = pass && zero_ok;
    const double secs = since(t0);
    detail += zero_ok ? "cancelled components zero" : "cancelled components NONZERO";
    report(4, "gradient checks", pass && secs < 60.0, "max relative error at 5 points: " + detail, secs);
}

// ------------------------------------------------------------------ 5

std::vector<double> oracle_route(const std::vector<double>& u, const Tensor& W, const capsule::RoutingShape& s, int iters) {
    const std::size_t n = s.primary, z = s.classes, dc = s.class_dim, dp = s.primary_dim;
    std::vector<double> uh(n * z * dc, 0.0), b(n * z, 0.0), v(z * dc, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t h = 0; h < z; ++h)
            for (std::size_t r = 0; r < dc; ++r)
                for (std::size_t q = 0; q < dp; ++q) uh[(i * z + h) * dc + r] += W.at(i, h, r, q) * u[i * dp + q];
    for (int it = 0; it < iters; ++it) {
        for (std::size_t h = 0; h < z; ++h) {
            std::vector<double> sv(dc, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double den = 0;
                for (std::size_t g = 0; g < z; ++g) den += std::exp(b[i * z + g]);
                for (std::size_t r = 0; r < dc; ++r) sv[r] += std::exp(b[i * z + h]) / den * uh[(i * z + h) * dc + r];
            }
            double l2 = 0;
            for (double x : sv) l2 += x * x;
            const double l = std::sqrt(l2);
            for (std::size_t r = 0; r < dc; ++r) v[h * dc + r] = l == 0 ? 0 : l / (1 + l2) * sv[r];
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t h = 0; h < z; ++h)
                for (std::size_t r = 0; r < dc; ++r) b[i * z + h] += uh[(i * z + h) * dc + r] * v[h * dc + r];
    }
    return v;
}

void capsule_invariants() {
    const auto t0 = Clock::now();
    Rng rng(mix_seed(100, 5));
    auto len = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    const double at1 = len(capsule::squash(std::vector<double>{0.6, 0.0, -0.8}));
    const double at3 = len(capsule::squash(std::vector<double>{1.0, 2.0, 2.0}));
    bool range = true;
    for (int i = 0; i < 1000; ++i) {
        const double l = len(capsule::squash(random_vec(rng, 8, rng.uniform(0, 20))));
        range = range && l >= 0.0 && l < 1.0;
    }
    double coupling = 0;
    const capsule::RoutingShape big{32, 3, 8, 16};
    for (int trial = 0; trial < 50; ++trial) {
        capsule::RoutingState state;
        Tensor t(big.transform_shape());
        for (auto& x : t.values()) x = 0.5 * rng.normal();
        capsule::route(random_vec(rng, 256), t, big, 3, &state);
        for (const auto& c : state.coupling_history)
            for (std::size_t i = 0; i < 32; ++i) coupling = std::max(coupling, std::abs(c[i * 3] + c[i * 3 + 1] + c[i * 3 + 2] - 1.0));
    }
    double oracle = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const capsule::RoutingShape s{2 + rng.index(5), 3, 2 + rng.index(3), 2 + rng.index(3)};
        Tensor t(s.transform_shape());
        for (auto& x : t.values()) x = rng.normal();
        const auto u = random_vec(rng, s.primary * s.primary_dim);
        const auto got = capsule::route(u, t, s, 3);
        const auto want = oracle_route(u, t, s, 3);
        for (std::size_t i = 0; i < want.size(); ++i) oracle = std::max(oracle, std::abs(got.v[i] - want[i]));
    }
    const bool pass = std::abs(at1 - 0.5) <= 1e-15 && std::abs(at3 - 0.9) <= 1e-15 && range && coupling <= 1e-12 && oracle <= 1e-12;
    report(5, "capsule invariants", pass,
           fmt("squash |v|=%.15g at 1, %.15g at 3, range [0,1) %s; coupling sum error %.1e; oracle error %.1e", at1, at3,
               range ? "ok" : "VIOLATED", coupling, oracle),
           since(t0));
}

// ------------------------------------------------------------------ 6, 7, 8, 9

struct Benchmark {
    Dataset train, test;
    std::map<std::string, double> oa, seconds;
    std::unique_ptr<model::Network> full;
    synth::SynthConfig synth;
};

Benchmark run_benchmark() {
    Benchmark b;
    b.synth.samples = 5000;
    b.synth.seed = 7;
    b.train = synth::generate(b.synth);
    auto test_cfg = b.synth;
    test_cfg.samples = 1000;
    test_cfg.seed = 8;
    b.test = synth::generate(test_cfg);
    model::ModelConfig cfg;
    cfg.seed = 7;
    for (auto kind : {model::ModelKind::Base, model::ModelKind::FfcOnly, model::ModelKind::Full, model::ModelKind::Cnn}) {
        auto net = model::make_network(kind, cfg);
        const auto hist = model::train(*net, b.train);
        const std::string name = model::kind_name(kind);
        b.seconds[name] = hist.total_seconds();
        b.oa[name] = model::accuracy_percent(*net, b.test);
        std::printf("  benchmark %-5s held-out OA %6.2f%%  train %.1f s  final loss %.5f\n", name.c_str(), b.oa[name],
                    b.seconds[name], hist.loss.back());
        std::fflush(stdout);
        if (kind == model::ModelKind::Full) b.full = std::move(net);
    }
    return b;
}

void synthetic_benchmark(const Benchmark& b, double secs) {
    const double base = b.oa.at("base"), ffc = b.oa.at("ffc"), full = b.oa.at("full");
    const bool pass = full >= 90.0 && ffc - base >= 5.0 && full - ffc >= 5.0;
    report(6, "synthetic benchmark", pass,
           fmt("held-out OA base %.1f%% < ffc_only %.1f%% < full %.1f%% (steps %+.1f / %+.1f pp, need full >= 90 and >= +5 each)",
               base, ffc, full, ffc - base, full - ffc),
           secs);
}

void interpretability(const Benchmark& b) {
    const auto t0 = Clock::now();
    const auto& net = dynamic_cast<const model::Ffcdnn&>(*b.full);
    const auto sigs = b.synth.signatures();
    bool pass = true;
    std::string detail;
    for (auto c : {StressClass::YellowRust, StressClass::NitrogenDeficiency}) {
        const auto r = eval::class_r2(net, b.test, c, sigs[index_of(c)]);
        pass = pass && r.in_count > 0 && r.out_count > 0 && r.gap() >= 0.2;
        detail += fmt("%s in-band %.3f (n=%zu) vs out %.3f (n=%zu) gap %.3f; ", std::string(class_name(c)).c_str(), r.in_band_mean,
                      r.in_count, r.out_band_mean, r.out_count, r.gap());
    }
    const double secs = since(t0);
    report(7, "interpretability", pass && secs < 120.0, detail + "need gap >= 0.2", secs);
}

void band_mask_null(const Benchmark& b) {
    const auto t0 = Clock::now();
    const auto& net = dynamic_cast<const model::Ffcdnn&>(*b.full);
    const auto& cfg = net.config();
    const std::size_t n = cfg.steps, half = n / 2;
    std::vector<std::size_t> outside;
    for (std::size_t j = 0; j <= half; ++j)
        if (!cfg.mask.contains(j)) outside.push_back(j);
    Rng rng(mix_seed(100, 8));
    double worst = 0;
    int flips = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto& base = b.test[rng.index(b.test.size())].patch;
        auto moved = base;
        for (std::size_t p = 0; p < base.pixels(); ++p)
            for (auto ch : {vi::Channel::LAI, vi::Channel::LCC}) {
                Spectrum s;
                s.bins.assign(n, Complex{0.0, 0.0});
                for (std::size_t j : outside) {
                    const double amp = rng.uniform(0.0, 2.0);
                    const Complex c(amp * rng.normal(), j == 0 || j == half ? 0.0 : amp * rng.normal());
                    s.bins[j] = c;
                    if (j != 0 && j != half) s.bins[n - j] = std::conj(c);
                }
                const auto delta = idft(s);
                auto series = moved.series(p, ch);
                for (std::size_t t = 0; t < n; ++t) series[t] += delta[t];
                moved.set_series(p, ch, series);
            }
        const auto fa = net.ffc_features(base), fb = net.ffc_features(moved);
        for (std::size_t i = 0; i < fa.size(); ++i) worst = std::max(worst, std::abs(fa[i] - fb[i]));
        flips += net.predict(base).label != net.predict(moved).label;
    }
    report(8, "band-mask null effect", worst <= 1e-9 && flips == 0,
           fmt("max FFC feature change %.2e, %d prediction flips over 100 trials", worst, flips), since(t0));
}

int run_cli(const std::string& args, const fs::path& log) {
    const int status = std::system((kCli + " " + args + " >" + log.string() + " 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void performance(const Benchmark& b, const fs::path& work) {
    const auto t0 = Clock::now();
    const auto csv = work / "bench.csv";
    const int rc = run_cli("bench --sizes 64,256,1024,4096 --reps 5 --out " + csv.string(), work / "bench.log");
    std::ifstream in(csv);
    std::string line, crossover = "none";
    while (std::getline(in, line))
        if (line.rfind("# crossover,", 0) == 0) crossover = line.substr(12);
    const bool cross = rc == 0 && crossover != "none" && std::stoul(crossover) <= 4096;
    const double tf = b.seconds.at("full"), tc = b.seconds.at("cnn");
    report(9, "performance ordering", cross && tf < tc,
           fmt("bench crossover N=%s; training wall clock full %.1f s vs cnn %.1f s (ratio %.2f)", crossover.c_str(), tf, tc, tf / tc),
           since(t0));
}

// ------------------------------------------------------------------ 10

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism(const fs::path& work) {
    const auto t0 = Clock::now();
    const auto conf = work / "small.conf";
    std::ofstream(conf) << "samples = 120\nepochs = 2\nseed = 7\n";
    const std::string fixtures = kData + "/fixtures/";
    std::vector<std::string> primary;
    bool ok = true;
    for (const char* run : {"a", "b"}) {
        const auto d = work / run;
        fs::remove_all(d);
        fs::create_directories(d);
        const std::string c = "--config " + conf.string() + " ";
        const std::string ds = (d / "data").string(), models = (d / "models").string();
        const std::vector<std::string> cmds{
            "simulate-bands --spectra " + fixtures + "spectrum_0.csv --spectra " + fixtures + "spectrum_1.csv --spectra " +
                fixtures + "spectrum_2.csv --rsr " + fixtures + "s2_rsr_gaussian.csv --out " + (d / "series.csv").string(),
            c + "prefilter --series " + (d / "series.csv").string() + " --out " + (d / "pre").string(),
            c + "gen --out " + ds,
            c + "train --data " + ds + " --out " + models + " --ablation base,ffc,full --baseline cnn",
            c + "eval --model " + models + "/model_full.bin --data " + ds + " --out " + (d / "eval").string(),
            c + "explain --model " + models + "/model_full.bin --data " + ds + " --out " + (d / "explain").string(),
        };
        for (const auto& cmd : cmds) {
            const int rc = run_cli(cmd, d / "log.txt");
            if (rc != 0) {
                ok = false;
                std::fprintf(stderr, "determinism: '%s' exited %d\n%s\n", cmd.c_str(), rc, slurp(d / "log.txt").c_str());
            }
        }
    }
    std::size_t files = 0, differ = 0;
    std::string which;
    for (const auto& e : fs::recursive_directory_iterator(work / "a")) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), work / "a");
        const auto name = rel.filename().string();
        // Wall-clock records are not primary outputs.
        if (name == "log.txt" || name == "timing.json" || name.find("manifest") != std::string::npos) continue;
        ++files;
        if (slurp(e.path()) != slurp(work / "b" / rel)) {
            ++differ;
            which += " " + rel.string();
        }
    }
    report(10, "determinism", ok && files >= 15 && differ == 0,
           fmt("%zu primary outputs from 6 commands re-run, %zu differ%s", files, differ, which.c_str()), since(t0));
}

} // namespace

int main() {
    const auto work = fs::temp_directory_path() / "ffcdnn_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);
    try {
        metric_fidelity();
        dft_oracle();
        convolution_theorem();
        gradient_checks();
        capsule_invariants();
        const auto t0 = Clock::now();
        const auto bench = run_benchmark();
        synthetic_benchmark(bench, since(t0));
        interpretability(bench);
        band_mask_null(bench);
        performance(bench, work);
        determinism(work);
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "PASSED", failures);
    return failures ? 1 : 0;
}

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ffcdnn/ffc/fourier_conv.hpp"
#include "ffcdnn/model/classifier.hpp"
#include "ffcdnn/model/network.hpp"
#include "ffcdnn/rng.hpp"

namespace ffcdnn::model {

namespace detail {

/// logits = W x + b for a 3 x D weight matrix.
inline std::array<double, kNumClasses> affine3(const Tensor& w, const Tensor& b, std::span<const double> x) {
    std::array<double, kNumClasses> out{};
    const std::size_t d = x.size();
    for (std::size_t h = 0; h < kNumClasses; ++h) {
        double acc = b[h];
        const double* row = w.data() + h * d;
        for (std::size_t i = 0; i < d; ++i) acc += row[i] * x[i];
        out[h] = acc;
    }
    return out;
}

inline Prediction softmax_prediction(std::span<const double> logits) {
    const auto p = softmax3(logits);
    return argmax_prediction(p);
}

} // namespace detail

/// Ablation without any of the characterized modules: the flattened VI
/// patch goes straight into an affine layer and softmax. Zero initialized.
class LinearBase : public Network {
public:
    explicit LinearBase(const ModelConfig& cfg)
        : cfg_(cfg), dim_(cfg.k * cfg.k * cfg.steps * vi::kChannels), w_({kNumClasses, dim_}), b_({kNumClasses}) {}

    ModelKind kind() const override { return ModelKind::Base; }
    const ModelConfig& config() const override { return cfg_; }
    std::vector<NamedTensor> parameters() override { return {{"affine.w", &w_}, {"affine.b", &b_}}; }

    Prediction predict(const vi::AgentPatch& patch) const override {
        check_patch(patch);
        return detail::softmax_prediction(detail::affine3(w_, b_, patch.values()));
    }

    double train_batch(std::span<const Sample* const> batch, std::vector<Tensor>& grads, bool,
                       std::vector<StressClass>* predicted) override {
        const double inv_b = 1.0 / static_cast<double>(batch.size());
        double loss = 0.0;
        for (const Sample* s : batch) {
            check_patch(s->patch);
            const auto x = s->patch.values();
            const auto logits = detail::affine3(w_, b_, x);
            std::array<double, kNumClasses> dl{};
            loss += cross_entropy(logits, index_of(s->label), inv_b, dl) * inv_b;
            if (predicted) predicted->push_back(detail::softmax_prediction(logits).label);
            for (std::size_t h = 0; h < kNumClasses; ++h) {
                grads[1][h] += dl[h];
                double* gw = grads[0].data() + h * dim_;
                for (std::size_t i = 0; i < dim_; ++i) gw[i] += dl[h] * x[i];
            }
        }
        return loss;
    }

private:
    ModelConfig cfg_;
    std::size_t dim_;
    Tensor w_;
    Tensor b_;
};

/// Ablation with the Fourier-convolution branches but no capsule encoder:
/// FFC features -> affine -> softmax.
class FfcLinear : public Network {
public:
    explicit FfcLinear(const ModelConfig& cfg)
        : cfg_(cfg), conv_(cfg.k * cfg.k, cfg.steps, cfg.mask, cfg.bands()), features_(2 * cfg.branch_features()),
          w_({kNumClasses, features_}), b_({kNumClasses}) {
        Rng rng(mix_seed(cfg.seed, 1));
        for (auto& k : kernels_) k = ffc::FourierKernel::random_phase(conv_.pixels(), conv_.bins(), rng);
    }

    ModelKind kind() const override { return ModelKind::FfcOnly; }
    const ModelConfig& config() const override { return cfg_; }
    std::vector<NamedTensor> parameters() override {
        return {{"lai.kernel_re", &kernels_[0].re}, {"lai.kernel_im", &kernels_[0].im}, {"lai.bias", &kernels_[0].bias},
                {"lcc.kernel_re", &kernels_[1].re}, {"lcc.kernel_im", &kernels_[1].im}, {"lcc.bias", &kernels_[1].bias},
                {"affine.w", &w_},                  {"affine.b", &b_}};
    }

    std::vector<double> ffc_features(const vi::AgentPatch& patch, std::array<ffc::FFCCache, 2>* caches = nullptr) const {
        check_patch(patch);
        std::vector<double> out;
        for (std::size_t br = 0; br < 2; ++br) {
            const auto f = conv_.forward(channel_block(patch, static_cast<vi::Channel>(br)), kernels_[br],
                                         caches ? &(*caches)[br] : nullptr);
            out.insert(out.end(), f.values.begin(), f.values.end());
        }
        return out;
    }

    Prediction predict(const vi::AgentPatch& patch) const override {
        return detail::softmax_prediction(detail::affine3(w_, b_, ffc_features(patch)));
    }

    double train_batch(std::span<const Sample* const> batch, std::vector<Tensor>& grads, bool,
                       std::vector<StressClass>* predicted) override {
        const double inv_b = 1.0 / static_cast<double>(batch.size());
        const std::size_t per_branch = cfg_.branch_features();
        double loss = 0.0;
        std::vector<double> dfeat(features_);
        for (const Sample* s : batch) {
            std::array<ffc::FFCCache, 2> caches;
            const auto x = ffc_features(s->patch, &caches);
            const auto logits = detail::affine3(w_, b_, x);
            std::array<double, kNumClasses> dl{};
            loss += cross_entropy(logits, index_of(s->label), inv_b, dl) * inv_b;
            if (predicted) predicted->push_back(detail::softmax_prediction(logits).label);
            std::fill(dfeat.begin(), dfeat.end(), 0.0);
            for (std::size_t h = 0; h < kNumClasses; ++h) {
                grads[7][h] += dl[h];
                double* gw = grads[6].data() + h * features_;
                const double* w = w_.data() + h * features_;
                for (std::size_t i = 0; i < features_; ++i) {
                    gw[i] += dl[h] * x[i];
                    dfeat[i] += dl[h] * w[i];
                }
            }
            for (std::size_t br = 0; br < 2; ++br) {
                ffc::FourierKernel g(conv_.pixels(), conv_.bins());
                conv_.backward(caches[br], std::span<const double>(dfeat).subspan(br * per_branch, per_branch),
                               kernels_[br], g, {});
                grads[3 * br + 0] += g.re;
                grads[3 * br + 1] += g.im;
                grads[3 * br + 2] += g.bias;
            }
        }
        return loss;
    }

private:
    ModelConfig cfg_;
    ffc::FourierConv conv_;
    std::array<ffc::FourierKernel, 2> kernels_;
    std::size_t features_;
    Tensor w_;
    Tensor b_;
};

/// Time-domain CNN baseline: four 1-D convolutions along time (kernel 3,
/// zero "same" padding, ReLU; widths 16/32/32/64) over the 2 k^2 pixel-channel
/// series, then two affine layers and softmax.
class CnnBaseline : public Network {
public:
    static constexpr std::array<std::size_t, 4> kWidths{16, 32, 32, 64};
    static constexpr std::size_t kTaps = 3;

    explicit CnnBaseline(const ModelConfig& cfg) : cfg_(cfg) {
        Rng rng(mix_seed(cfg.seed, 1));
        std::size_t in = cfg.k * cfg.k * vi::kChannels;
        for (std::size_t l = 0; l < 4; ++l) {
            conv_w_[l] = Tensor({kWidths[l], in, kTaps});
            conv_b_[l] = Tensor({kWidths[l]});
            const double sd = std::sqrt(2.0 / static_cast<double>(in * kTaps));
            for (auto& v : conv_w_[l].values()) v = rng.normal(0.0, sd);
            in = kWidths[l];
        }
        const std::size_t flat = kWidths[3] * cfg.steps;
        fc1_w_ = Tensor({cfg.cnn_hidden, flat});
        fc1_b_ = Tensor({cfg.cnn_hidden});
        fc2_w_ = Tensor({kNumClasses, cfg.cnn_hidden});
        fc2_b_ = Tensor({kNumClasses});
        const double sd1 = std::sqrt(2.0 / static_cast<double>(flat));
        for (auto& v : fc1_w_.values()) v = rng.normal(0.0, sd1);
        const double sd2 = std::sqrt(1.0 / static_cast<double>(cfg.cnn_hidden));
        for (auto& v : fc2_w_.values()) v = rng.normal(0.0, sd2);
    }

    ModelKind kind() const override { return ModelKind::Cnn; }
    const ModelConfig& config() const override { return cfg_; }

    std::vector<NamedTensor> parameters() override {
        return {{"conv1.w", &conv_w_[0]}, {"conv1.b", &conv_b_[0]}, {"conv2.w", &conv_w_[1]}, {"conv2.b", &conv_b_[1]},
                {"conv3.w", &conv_w_[2]}, {"conv3.b", &conv_b_[2]}, {"conv4.w", &conv_w_[3]}, {"conv4.b", &conv_b_[3]},
                {"fc1.w", &fc1_w_},       {"fc1.b", &fc1_b_},       {"fc2.w", &fc2_w_},       {"fc2.b", &fc2_b_}};
    }

    struct Activations {
        std::array<std::vector<double>, 5> a; // a[0] input (C x T), a[l+1] post-ReLU of conv l
        std::vector<double> h;               // post-ReLU hidden
        std::array<double, kNumClasses> logits{};
    };

    /// Input as channels x time: channel = pixel * 2 + vi channel.
    std::vector<double> input_block(const vi::AgentPatch& p) const {
        check_patch(p);
        const std::size_t T = p.steps();
        std::vector<double> x(p.pixels() * vi::kChannels * T);
        for (std::size_t px = 0; px < p.pixels(); ++px)
            for (std::size_t c = 0; c < vi::kChannels; ++c)
                for (std::size_t t = 0; t < T; ++t)
                    x[(px * vi::kChannels + c) * T + t] = p.at(px / p.k(), px % p.k(), t, static_cast<vi::Channel>(c));
        return x;
    }

    Activations forward(std::vector<double> x) const {
        Activations act;
        const std::size_t T = cfg_.steps;
        act.a[0] = std::move(x);
        std::size_t in = cfg_.k * cfg_.k * vi::kChannels;
        for (std::size_t l = 0; l < 4; ++l) {
            const std::size_t out = kWidths[l];
            auto& y = act.a[l + 1];
            y.assign(out * T, 0.0);
            const auto& xin = act.a[l];
            const double* W = conv_w_[l].data();
            for (std::size_t o = 0; o < out; ++o) {
                double* yo = &y[o * T];
                for (std::size_t t = 0; t < T; ++t) yo[t] = conv_b_[l][o];
                for (std::size_t i = 0; i < in; ++i) {
                    const double* xi = &xin[i * T];
                    const double w0 = W[(o * in + i) * kTaps + 0];
                    const double w1 = W[(o * in + i) * kTaps + 1];
                    const double w2 = W[(o * in + i) * kTaps + 2];
                    // y[t] += w0 x[t-1] + w1 x[t] + w2 x[t+1]
                    for (std::size_t t = 0; t < T; ++t) yo[t] += w1 * xi[t];
                    for (std::size_t t = 1; t < T; ++t) yo[t] += w0 * xi[t - 1];
                    for (std::size_t t = 0; t + 1 < T; ++t) yo[t] += w2 * xi[t + 1];
                }
                for (std::size_t t = 0; t < T; ++t) yo[t] = yo[t] > 0.0 ? yo[t] : 0.0;
            }
            in = out;
        }
        const auto& flat = act.a[4];
        const std::size_t H = cfg_.cnn_hidden;
        act.h.assign(H, 0.0);
        for (std::size_t j = 0; j < H; ++j) {
            double acc = fc1_b_[j];
            const double* row = fc1_w_.data() + j * flat.size();
            for (std::size_t i = 0; i < flat.size(); ++i) acc += row[i] * flat[i];
            act.h[j] = acc > 0.0 ? acc : 0.0;
        }
        for (std::size_t h = 0; h < kNumClasses; ++h) {
            double acc = fc2_b_[h];
            for (std::size_t j = 0; j < H; ++j) acc += fc2_w_[h * H + j] * act.h[j];
            act.logits[h] = acc;
        }
        return act;
    }

    Prediction predict(const vi::AgentPatch& patch) const override {
        return detail::softmax_prediction(forward(input_block(patch)).logits);
    }

    /// Accumulates parameter gradients for upstream dlogits; returns d input.
    std::vector<double> backward(const Activations& act, std::span<const double> dlogits, std::vector<Tensor>& grads) const {
        const std::size_t T = cfg_.steps;
        const std::size_t H = cfg_.cnn_hidden;
        const auto& flat = act.a[4];
        std::vector<double> dh(H, 0.0);
        for (std::size_t h = 0; h < kNumClasses; ++h) {
            grads[11][h] += dlogits[h];
            for (std::size_t j = 0; j < H; ++j) {
                grads[10][h * H + j] += dlogits[h] * act.h[j];
                dh[j] += dlogits[h] * fc2_w_[h * H + j];
            }
        }
        std::vector<double> dflat(flat.size(), 0.0);
        for (std::size_t j = 0; j < H; ++j) {
            if (!(act.h[j] > 0.0)) continue;
            const double g = dh[j];
            grads[9][j] += g;
            double* gw = grads[8].data() + j * flat.size();
            const double* row = fc1_w_.data() + j * flat.size();
            for (std::size_t i = 0; i < flat.size(); ++i) {
                gw[i] += g * flat[i];
                dflat[i] += g * row[i];
            }
        }
        std::vector<double> dy = std::move(dflat);
        for (std::size_t l = 4; l-- > 0;) {
            const std::size_t out = kWidths[l];
            const std::size_t in = l == 0 ? cfg_.k * cfg_.k * vi::kChannels : kWidths[l - 1];
            const auto& y = act.a[l + 1];
            const auto& xin = act.a[l];
            for (std::size_t i = 0; i < out * T; ++i)
                if (!(y[i] > 0.0)) dy[i] = 0.0;
            std::vector<double> dx(in * T, 0.0);
            const double* W = conv_w_[l].data();
            double* gW = grads[2 * l].data();
            for (std::size_t o = 0; o < out; ++o) {
                const double* dyo = &dy[o * T];
                double bsum = 0.0;
                for (std::size_t t = 0; t < T; ++t) bsum += dyo[t];
                grads[2 * l + 1][o] += bsum;
                for (std::size_t i = 0; i < in; ++i) {
                    const double* xi = &xin[i * T];
                    double* dxi = &dx[i * T];
                    const std::size_t wi = (o * in + i) * kTaps;
                    double g0 = 0.0, g1 = 0.0, g2 = 0.0;
                    for (std::size_t t = 0; t < T; ++t) g1 += dyo[t] * xi[t];
                    for (std::size_t t = 1; t < T; ++t) g0 += dyo[t] * xi[t - 1];
                    for (std::size_t t = 0; t + 1 < T; ++t) g2 += dyo[t] * xi[t + 1];
                    gW[wi + 0] += g0;
                    gW[wi + 1] += g1;
                    gW[wi + 2] += g2;
                    const double w0 = W[wi + 0], w1 = W[wi + 1], w2 = W[wi + 2];
                    for (std::size_t t = 0; t < T; ++t) dxi[t] += w1 * dyo[t];
                    for (std::size_t t = 1; t < T; ++t) dxi[t - 1] += w0 * dyo[t];
                    for (std::size_t t = 0; t + 1 < T; ++t) dxi[t + 1] += w2 * dyo[t];
                }
            }
            dy = std::move(dx);
        }
        return dy;
    }

    double train_batch(std::span<const Sample* const> batch, std::vector<Tensor>& grads, bool,
                       std::vector<StressClass>* predicted) override {
        const double inv_b = 1.0 / static_cast<double>(batch.size());
        double loss = 0.0;
        for (const Sample* s : batch) {
            const auto act = forward(input_block(s->patch));
            std::array<double, kNumClasses> dl{};
            loss += cross_entropy(act.logits, index_of(s->label), inv_b, dl) * inv_b;
            if (predicted) predicted->push_back(detail::softmax_prediction(act.logits).label);
            backward(act, dl, grads);
        }
        return loss;
    }

private:
    ModelConfig cfg_;
    std::array<Tensor, 4> conv_w_;
    std::array<Tensor, 4> conv_b_;
    Tensor fc1_w_, fc1_b_, fc2_w_, fc2_b_;
};

} // namespace ffcdnn::model

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ffcdnn/capsule/normalize.hpp"
#include "ffcdnn/capsule/primary.hpp"
#include "ffcdnn/capsule/routing.hpp"
#include "ffcdnn/ffc/fourier_conv.hpp"
#include "ffcdnn/model/classifier.hpp"
#include "ffcdnn/model/network.hpp"
#include "ffcdnn/numerics/grad_tape.hpp"
#include "ffcdnn/rng.hpp"

namespace ffcdnn::model {

/// Two Fourier-convolution branches (VI_LAI, VI_LCC) -> feature normalization
/// -> primary capsules -> agreement routing to three class capsules ->
/// capsule-length classifier. Trained with the margin loss.
class Ffcdnn : public Network {
public:
    static constexpr std::size_t kBranches = 2;

    explicit Ffcdnn(const ModelConfig& cfg)
        : cfg_(cfg), conv_(cfg.k * cfg.k, cfg.steps, cfg.mask, cfg.bands()),
          norm_(kBranches * cfg.branch_features()),
          layout_({cfg.branch_features(), cfg.branch_features()}, cfg.primary_dim), shape_(cfg.routing_shape()),
          transforms_(shape_.transform_shape()) {
        cfg_.validate();
        Rng rng(mix_seed(cfg.seed, 1));
        for (auto& k : kernels_) k = ffc::FourierKernel::random_phase(conv_.pixels(), conv_.bins(), rng);
        for (auto& v : transforms_.values()) v = rng.normal(0.0, cfg.transform_init_std);
    }

    ModelKind kind() const override { return ModelKind::Full; }
    const ModelConfig& config() const override { return cfg_; }

    std::vector<NamedTensor> parameters() override {
        return {{"lai.kernel_re", &kernels_[0].re}, {"lai.kernel_im", &kernels_[0].im}, {"lai.bias", &kernels_[0].bias},
                {"lcc.kernel_re", &kernels_[1].re}, {"lcc.kernel_im", &kernels_[1].im}, {"lcc.bias", &kernels_[1].bias},
                {"norm.scale", &norm_.scale},       {"norm.shift", &norm_.shift},       {"routing.transforms", &transforms_}};
    }

    std::vector<NamedTensor> buffers() override {
        return {{"norm.running_mean", &norm_.running_mean}, {"norm.running_var", &norm_.running_var}};
    }

    const ffc::FourierConv& conv() const noexcept { return conv_; }
    const capsule::CapsuleLayout& layout() const noexcept { return layout_; }
    const capsule::RoutingShape& routing_shape() const noexcept { return shape_; }
    ffc::FourierKernel& kernel(std::size_t branch) { return kernels_.at(branch); }
    capsule::FeatureNorm& norm() { return norm_; }
    Tensor& transforms() { return transforms_; }

    /// Concatenated raw FFC features (LAI branch then LCC branch).
    std::vector<double> ffc_features(const vi::AgentPatch& patch) const {
        check_patch(patch);
        std::vector<double> out;
        out.reserve(norm_.channels());
        for (std::size_t br = 0; br < kBranches; ++br) {
            const auto block = channel_block(patch, static_cast<vi::Channel>(br));
            const auto f = conv_.forward(block, kernels_[br]);
            out.insert(out.end(), f.values.begin(), f.values.end());
        }
        return out;
    }

    /// Normalized features packed into K3 x d_p primary capsules (inference mode).
    std::vector<double> primary_capsules(const vi::AgentPatch& patch) const {
        return layout_.pack(norm_.forward_infer(ffc_features(patch)));
    }

    capsule::ClassCapsules class_capsules(const vi::AgentPatch& patch, capsule::RoutingState* state = nullptr) const {
        return capsule::route(primary_capsules(patch), transforms_, shape_, cfg_.routing_iters, state);
    }

    Prediction predict(const vi::AgentPatch& patch) const override { return classify(class_capsules(patch)); }

    double train_batch(std::span<const Sample* const> batch, std::vector<Tensor>& grads, bool update_state,
                       std::vector<StressClass>* predicted) override {
        const std::size_t B = batch.size();
        if (B == 0) throw InvalidArgument("ffcdnn: empty batch");
        const std::size_t F = norm_.channels();
        const std::size_t per_branch = cfg_.branch_features();
        const double inv_b = 1.0 / static_cast<double>(B);

        GradTape tape;
        std::vector<GradTape::Slot> slots;
        for (auto& g : grads) slots.push_back(tape.watch(g.shape()));

        // FFC branches.
        std::vector<std::array<ffc::FFCCache, kBranches>> conv_cache(B);
        std::vector<double> feats(B * F);
        for (std::size_t b = 0; b < B; ++b) {
            check_patch(batch[b]->patch);
            for (std::size_t br = 0; br < kBranches; ++br) {
                const auto block = channel_block(batch[b]->patch, static_cast<vi::Channel>(br));
                const auto f = conv_.forward(block, kernels_[br], &conv_cache[b][br]);
                std::copy(f.values.begin(), f.values.end(), feats.begin() + static_cast<std::ptrdiff_t>(b * F + br * per_branch));
            }
        }
        auto dfeats = std::make_shared<std::vector<double>>(B * F, 0.0);
        tape.record([&, dfeats, slots](GradTape& t) {
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t br = 0; br < kBranches; ++br) {
                    ffc::FourierKernel g(conv_.pixels(), conv_.bins());
                    conv_.backward(conv_cache[b][br],
                                   std::span<const double>(*dfeats).subspan(b * F + br * per_branch, per_branch),
                                   kernels_[br], g, {});
                    t.grad(slots[3 * br + 0]) += g.re;
                    t.grad(slots[3 * br + 1]) += g.im;
                    t.grad(slots[3 * br + 2]) += g.bias;
                }
        });

        // Normalization over the batch.
        capsule::FeatureNorm::Cache norm_cache;
        const auto normed = norm_.forward_train(feats, B, norm_cache, update_state);
        auto dnormed = std::make_shared<std::vector<double>>(B * F, 0.0);
        tape.record([&, dnormed, dfeats, slots](GradTape& t) {
            const auto dx = norm_.backward(norm_cache, *dnormed, t.grad(slots[6]).values(), t.grad(slots[7]).values());
            for (std::size_t i = 0; i < dx.size(); ++i) (*dfeats)[i] += dx[i];
        });

        // Capsules, routing, loss.
        std::vector<capsule::RoutingCache> route_cache(B);
        std::vector<capsule::ClassCapsules> caps(B);
        double loss = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
            const auto u = layout_.pack(std::span<const double>(normed).subspan(b * F, F));
            caps[b] = capsule::route(u, transforms_, shape_, cfg_.routing_iters, nullptr, &route_cache[b]);
            const std::size_t label = index_of(batch[b]->label);
            loss += margin_loss(caps[b], label, cfg_.margin) * inv_b;
            if (predicted) predicted->push_back(classify(caps[b]).label);
        }
        tape.record([&, dnormed, slots](GradTape& t) {
            std::vector<double> dv(shape_.classes * shape_.class_dim);
            std::vector<double> du(shape_.primary * shape_.primary_dim);
            for (std::size_t b = 0; b < B; ++b) {
                std::fill(dv.begin(), dv.end(), 0.0);
                std::fill(du.begin(), du.end(), 0.0);
                margin_loss_backward(caps[b], index_of(batch[b]->label), cfg_.margin, inv_b, dv);
                capsule::route_backward(route_cache[b], dv, transforms_, shape_, t.grad(slots[8]), du);
                layout_.unpack_grad(du, std::span<double>(*dnormed).subspan(b * F, F));
            }
        });

        tape.backward();
        for (std::size_t i = 0; i < grads.size(); ++i) grads[i] += tape.grad(slots[i]);
        return loss;
    }

private:
    ModelConfig cfg_;
    ffc::FourierConv conv_;
    std::array<ffc::FourierKernel, kBranches> kernels_;
    capsule::FeatureNorm norm_;
    capsule::CapsuleLayout layout_;
    capsule::RoutingShape shape_;
    Tensor transforms_;
};

} // namespace ffcdnn::model

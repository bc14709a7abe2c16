#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ffcdnn/classes.hpp"
#include "ffcdnn/dataset.hpp"
#include "ffcdnn/model/classifier.hpp"
#include "ffcdnn/model/config.hpp"
#include "ffcdnn/numerics/tensor.hpp"
#include "ffcdnn/vi/patches.hpp"

namespace ffcdnn::model {

using ffcdnn::Dataset;
using ffcdnn::Sample;

enum class ModelKind : std::uint32_t { Full = 0, Base = 1, FfcOnly = 2, Cnn = 3 };

inline const char* kind_name(ModelKind k) {
    switch (k) {
    case ModelKind::Full: return "full";
    case ModelKind::Base: return "base";
    case ModelKind::FfcOnly: return "ffc";
    case ModelKind::Cnn: return "cnn";
    }
    return "?";
}

struct NamedTensor {
    std::string name;
    Tensor* tensor;
};

/// Common surface of the capsule network, its ablations and the CNN baseline.
class Network {
public:
    virtual ~Network() = default;

    virtual ModelKind kind() const = 0;
    virtual const ModelConfig& config() const = 0;

    /// Trainable tensors, in a fixed order.
    virtual std::vector<NamedTensor> parameters() = 0;
    /// Non-trainable state that is still serialized (running statistics).
    virtual std::vector<NamedTensor> buffers() { return {}; }

    /// Mean loss over `batch`; adds d(mean loss)/d(param) into `grads`
    /// (aligned with parameters()). With `update_state` false the call is a
    /// pure function of the parameters. Writes per-sample predicted labels
    /// when `predicted` is non-null.
    virtual double train_batch(std::span<const Sample* const> batch, std::vector<Tensor>& grads, bool update_state,
                               std::vector<StressClass>* predicted) = 0;

    virtual Prediction predict(const vi::AgentPatch& patch) const = 0;

    std::vector<Tensor> zero_grads() {
        std::vector<Tensor> g;
        for (auto& p : parameters()) g.emplace_back(p.tensor->shape());
        return g;
    }

    std::size_t parameter_count() {
        std::size_t n = 0;
        for (auto& p : parameters()) n += p.tensor->size();
        return n;
    }

    std::vector<double> flat_parameters() {
        std::vector<double> out;
        for (auto& p : parameters()) out.insert(out.end(), p.tensor->values().begin(), p.tensor->values().end());
        return out;
    }

    void set_flat_parameters(std::span<const double> flat) {
        std::size_t off = 0;
        for (auto& p : parameters()) {
            auto v = p.tensor->values();
            if (off + v.size() > flat.size()) throw InvalidArgument("set_flat_parameters: too few values");
            std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off), flat.begin() + static_cast<std::ptrdiff_t>(off + v.size()), v.begin());
            off += v.size();
        }
        if (off != flat.size()) throw InvalidArgument("set_flat_parameters: too many values");
    }

protected:
    void check_patch(const vi::AgentPatch& p) const {
        const auto& c = config();
        if (p.k() != c.k || p.steps() != c.steps)
            throw InvalidArgument("patch " + std::to_string(p.k()) + "x" + std::to_string(p.k()) + "x" +
                                  std::to_string(p.steps()) + " does not match model k=" + std::to_string(c.k) +
                                  ", K1=" + std::to_string(c.steps));
    }
};

/// Flattens a channel of a patch into pixels x K1.
inline std::vector<double> channel_block(const vi::AgentPatch& p, vi::Channel ch) {
    std::vector<double> out(p.pixels() * p.steps());
    for (std::size_t px = 0; px < p.pixels(); ++px)
        for (std::size_t t = 0; t < p.steps(); ++t) out[px * p.steps() + t] = p.at(px / p.k(), px % p.k(), t, ch);
    return out;
}

} // namespace ffcdnn::model

#pragma once

#include <memory>
#include <string>

#include "ffcdnn/model/baselines.hpp"
#include "ffcdnn/model/ffcdnn.hpp"
#include "ffcdnn/model/network.hpp"

namespace ffcdnn::model {

inline ModelKind parse_kind(const std::string& s) {
    if (s == "full") return ModelKind::Full;
    if (s == "base") return ModelKind::Base;
    if (s == "ffc" || s == "ffc_only") return ModelKind::FfcOnly;
    if (s == "cnn") return ModelKind::Cnn;
    throw InvalidArgument("unknown model kind '" + s + "' (expected base|ffc|full|cnn)");
}

/// Ablation ladder and baseline constructor. `Full` is the same class that
/// serves as the main model.
inline std::unique_ptr<Network> make_network(ModelKind kind, const ModelConfig& cfg) {
    switch (kind) {
    case ModelKind::Full: return std::make_unique<Ffcdnn>(cfg);
    case ModelKind::Base: return std::make_unique<LinearBase>(cfg);
    case ModelKind::FfcOnly: return std::make_unique<FfcLinear>(cfg);
    case ModelKind::Cnn: return std::make_unique<CnnBaseline>(cfg);
    }
    throw InvalidArgument("unknown model kind");
}

} // namespace ffcdnn::model

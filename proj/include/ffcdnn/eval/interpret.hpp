#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "ffcdnn/dataset.hpp"
#include "ffcdnn/error.hpp"
#include "ffcdnn/eval/r2.hpp"
#include "ffcdnn/model/baselines.hpp"
#include "ffcdnn/model/ffcdnn.hpp"
#include "ffcdnn/synth/generator.hpp"
#include "ffcdnn/util/parallel.hpp"

namespace ffcdnn::eval {

/// The feature vector a model exposes for separability analysis: primary
/// capsule components for the capsule network, pooled FFC features for the
/// FFC-linear variant and the flattened input otherwise.
inline std::vector<double> representation(const model::Network& net, const vi::AgentPatch& patch) {
    if (const auto* full = dynamic_cast<const model::Ffcdnn*>(&net)) return full->primary_capsules(patch);
    if (const auto* ffc = dynamic_cast<const model::FfcLinear*>(&net)) return ffc->ffc_features(patch);
    return {patch.values().begin(), patch.values().end()};
}

inline std::vector<std::vector<double>> representations(const model::Network& net, const Dataset& data, std::size_t threads = 1) {
    std::vector<std::vector<double>> out(data.size());
    parallel_for(data.size(), threads, [&](std::size_t i) { out[i] = representation(net, data[i].patch); });
    return out;
}

/// Origin of one primary-capsule component in (branch, pixel, pooled bins).
struct ComponentOrigin {
    bool padding = false;
    vi::Channel channel = vi::Channel::LAI;
    std::size_t pixel = 0;
    std::size_t bin_lo = 0, bin_hi = 0;
};

inline std::vector<ComponentOrigin> component_origins(const model::Ffcdnn& net) {
    const auto& cfg = net.config();
    const auto bands = cfg.bands();
    const std::size_t per_branch = cfg.branch_features();
    std::vector<ComponentOrigin> out;
    for (const auto& p : net.layout().provenance()) {
        ComponentOrigin o;
        o.padding = p.padding;
        if (!p.padding) {
            o.channel = static_cast<vi::Channel>(p.feature / per_branch);
            const std::size_t within = p.feature % per_branch;
            o.pixel = within / bands.size();
            o.bin_lo = bands[within % bands.size()].low;
            o.bin_hi = bands[within % bands.size()].high;
        }
        out.push_back(o);
    }
    return out;
}

/// Per-component R^2 against severity within one stress class, with each
/// component tagged in-band when its pooled bins lie inside that class's
/// signature band for its channel, out-of-band when disjoint from it.
struct ClassR2 {
    StressClass label = StressClass::YellowRust;
    std::vector<double> r2;             // per component; NaN for padding
    std::vector<std::optional<bool>> in_band; // nullopt: padding or partial overlap
    double in_band_mean = 0.0;
    double out_band_mean = 0.0;
    std::size_t in_count = 0, out_count = 0;

    double gap() const { return in_band_mean - out_band_mean; }
};

inline ClassR2 class_r2(const model::Ffcdnn& net, const Dataset& data, StressClass label,
                        const synth::ClassSignature& sig, std::size_t threads = 1) {
    Dataset subset;
    for (const auto& s : data)
        if (s.label == label) subset.push_back(s);
    if (subset.size() < 3) throw InsufficientDataError("r2: fewer than 3 samples of class " + std::string(class_name(label)));
    const auto reps = representations(net, subset, threads);
    const std::size_t comps = reps.front().size();
    std::vector<double> block, severity;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        block.insert(block.end(), reps[i].begin(), reps[i].end());
        severity.push_back(subset[i].severity);
    }
    ClassR2 out;
    out.label = label;
    out.r2 = r2_by_component(block, comps, severity);
    const auto origins = component_origins(net);
    for (std::size_t c = 0; c < comps; ++c) {
        const auto& o = origins[c];
        std::optional<bool> tag;
        if (o.padding) {
            out.r2[c] = std::nan("");
        } else {
            const auto& band = sig.band(o.channel);
            if (o.bin_lo >= band.lo && o.bin_hi <= band.hi) tag = true;
            else if (o.bin_hi < band.lo || o.bin_lo > band.hi) tag = false;
        }
        out.in_band.push_back(tag);
        if (!tag) continue;
        if (*tag) {
            out.in_band_mean += out.r2[c];
            ++out.in_count;
        } else {
            out.out_band_mean += out.r2[c];
            ++out.out_count;
        }
    }
    if (out.in_count) out.in_band_mean /= static_cast<double>(out.in_count);
    if (out.out_count) out.out_band_mean /= static_cast<double>(out.out_count);
    return out;
}

} // namespace ffcdnn::eval

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ffcdnn/capsule/routing.hpp"
#include "ffcdnn/capsule/squash.hpp"
#include "ffcdnn/classes.hpp"
#include "ffcdnn/error.hpp"

namespace ffcdnn::model {

struct Prediction {
    StressClass label = StressClass::Healthy;
    /// Class scores: activated capsule lengths for capsule models, softmax
    /// probabilities for the baselines.
    std::array<double, kNumClasses> lengths{};
    double margin = 0.0; // winner minus runner-up
    bool tie = false;
};

/// Argmax with lowest index winning exact ties.
inline Prediction argmax_prediction(std::span<const double> scores) {
    if (scores.size() != kNumClasses) throw InvalidArgument("prediction: expected 3 class scores");
    Prediction p;
    std::size_t best = 0;
    for (std::size_t h = 0; h < kNumClasses; ++h) {
        p.lengths[h] = scores[h];
        if (scores[h] > scores[best]) best = h;
    }
    double runner = -1e300;
    for (std::size_t h = 0; h < kNumClasses; ++h) {
        if (h == best) continue;
        runner = std::max(runner, scores[h]);
        if (scores[h] == scores[best]) p.tie = true;
    }
    p.label = class_from_index(best);
    p.margin = scores[best] - runner;
    return p;
}

/// Classifier activation: V_hat = squash(V) per class capsule; the label is
/// the class with the longest V_hat.
inline Prediction classify(const capsule::ClassCapsules& caps) {
    if (caps.classes != kNumClasses) throw InvalidArgument("classify: expected 3 class capsules");
    std::array<double, kNumClasses> len{};
    for (std::size_t h = 0; h < kNumClasses; ++h) len[h] = capsule::squash_length(caps.length(h));
    return argmax_prediction(len);
}

/// d|V_hat_h| / dV for upstream dlen (one per class); accumulates into dv.
inline void classify_lengths_backward(const capsule::ClassCapsules& caps, std::span<const double> dlen,
                                      std::span<double> dv) {
    for (std::size_t h = 0; h < caps.classes; ++h) {
        const double n = caps.length(h);
        if (n == 0.0) continue;
        // d/dn [n^2/(1+n^2)] = 2n/(1+n^2)^2 ; dn/dV = V/n
        const double scale = dlen[h] * 2.0 / ((1.0 + n * n) * (1.0 + n * n));
        const auto v = caps.capsule(h);
        for (std::size_t r = 0; r < caps.dim; ++r) dv[h * caps.dim + r] += scale * v[r];
    }
}

struct MarginLossConfig {
    double m_plus = 0.9;
    double m_minus = 0.1;
    double lambda_down = 0.5;
};

/// sum_h T_h max(0, m+ - |V_h|)^2 + lambda (1 - T_h) max(0, |V_h| - m-)^2
/// over class-capsule lengths.
inline double margin_loss(std::span<const double> lengths, std::size_t label, const MarginLossConfig& cfg = {}) {
    if (label >= lengths.size()) throw InvalidArgument("margin_loss: invalid label index");
    double loss = 0.0;
    for (std::size_t h = 0; h < lengths.size(); ++h) {
        if (h == label) {
            const double d = std::max(0.0, cfg.m_plus - lengths[h]);
            loss += d * d;
        } else {
            const double d = std::max(0.0, lengths[h] - cfg.m_minus);
            loss += cfg.lambda_down * d * d;
        }
    }
    return loss;
}

inline double margin_loss(const capsule::ClassCapsules& caps, std::size_t label, const MarginLossConfig& cfg = {}) {
    std::vector<double> len(caps.classes);
    for (std::size_t h = 0; h < caps.classes; ++h) len[h] = caps.length(h);
    return margin_loss(len, label, cfg);
}

/// Accumulates d loss / dV into dv (Z x d_c), scaled by `weight`.
inline void margin_loss_backward(const capsule::ClassCapsules& caps, std::size_t label, const MarginLossConfig& cfg,
                                 double weight, std::span<double> dv) {
    for (std::size_t h = 0; h < caps.classes; ++h) {
        const double n = caps.length(h);
        double dlen = 0.0;
        if (h == label) dlen = -2.0 * std::max(0.0, cfg.m_plus - n);
        else dlen = 2.0 * cfg.lambda_down * std::max(0.0, n - cfg.m_minus);
        if (dlen == 0.0 || n == 0.0) continue;
        const auto v = caps.capsule(h);
        for (std::size_t r = 0; r < caps.dim; ++r) dv[h * caps.dim + r] += weight * dlen * v[r] / n;
    }
}

inline std::array<double, kNumClasses> softmax3(std::span<const double> logits) {
    std::array<double, kNumClasses> p{};
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t h = 0; h < kNumClasses; ++h) sum += (p[h] = std::exp(logits[h] - mx));
    for (auto& v : p) v /= sum;
    return p;
}

/// Cross entropy of softmax(logits); writes weight * dloss/dlogits to dlogits.
inline double cross_entropy(std::span<const double> logits, std::size_t label, double weight,
                            std::span<double> dlogits) {
    const auto p = softmax3(logits);
    for (std::size_t h = 0; h < kNumClasses; ++h) dlogits[h] += weight * (p[h] - (h == label ? 1.0 : 0.0));
    return -std::log(std::max(p[label], 1e-300));
}

} // namespace ffcdnn::model

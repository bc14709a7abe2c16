#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/model/factory.hpp"
#include "ffcdnn/model/network.hpp"
#include "ffcdnn/model/optimizer.hpp"
#include "ffcdnn/rng.hpp"
#include "ffcdnn/util/parallel.hpp"

namespace ffcdnn::model {

struct TrainHistory {
    std::vector<double> loss;     // mean training loss per epoch
    std::vector<double> train_oa; // percent, predictions made during the epoch
    std::vector<double> val_oa;   // percent; empty without a validation set
    std::vector<double> seconds;  // cumulative wall clock

    double total_seconds() const { return seconds.empty() ? 0.0 : seconds.back(); }
};

struct TrainOptions {
    std::size_t threads = 1;
    /// Called after each epoch with (epoch index, history so far).
    std::function<void(std::size_t, const TrainHistory&)> on_epoch;
};

inline std::vector<Prediction> predict_all(const Network& net, const Dataset& data, std::size_t threads = 1) {
    std::vector<Prediction> out(data.size());
    parallel_for(data.size(), threads, [&](std::size_t i) { out[i] = net.predict(data[i].patch); });
    return out;
}

inline double accuracy_percent(const Network& net, const Dataset& data, std::size_t threads = 1) {
    if (data.empty()) return 0.0;
    const auto preds = predict_all(net, data, threads);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < data.size(); ++i) hit += preds[i].label == data[i].label;
    return 100.0 * static_cast<double>(hit) / static_cast<double>(data.size());
}

inline void require_all_classes(const Dataset& data) {
    std::array<std::size_t, kNumClasses> counts{};
    for (const auto& s : data) ++counts[index_of(s.label)];
    for (std::size_t h = 0; h < kNumClasses; ++h)
        if (counts[h] == 0)
            throw InvalidArgument(std::string("stratification: training split has no ") +
                                  std::string(kClassNames[h]) + " samples");
}

/// Mini-batch Adam over seeded per-epoch shuffles. Deterministic for a given
/// (network init, data, config); single-threaded over batches.
inline TrainHistory train(Network& net, const Dataset& data, const Dataset* validation = nullptr,
                          const TrainOptions& opts = {}) {
    const ModelConfig& cfg = net.config();
    require_all_classes(data);
    Adam adam(net.parameters(), cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    Rng rng(mix_seed(cfg.seed, 2));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    TrainHistory hist;
    const auto t0 = std::chrono::steady_clock::now();
    auto grads = net.zero_grads();
    std::vector<const Sample*> batch;
    std::vector<StressClass> predicted;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order.begin(), order.end());
        double loss_sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            batch.clear();
            for (std::size_t i = start; i < end; ++i) batch.push_back(&data[order[i]]);
            for (auto& g : grads) g.fill(0.0);
            predicted.clear();
            const double loss = net.train_batch(batch, grads, true, &predicted);
            if (!std::isfinite(loss)) throw NumericError("training diverged: non-finite loss in epoch " + std::to_string(epoch));
            for (const auto& g : grads)
                if (!g.all_finite()) throw NumericError("training diverged: non-finite gradient");
            adam.step(grads);
            loss_sum += loss * static_cast<double>(batch.size());
            for (std::size_t i = 0; i < batch.size(); ++i) hits += predicted[i] == batch[i]->label;
        }
        hist.loss.push_back(loss_sum / static_cast<double>(data.size()));
        hist.train_oa.push_back(100.0 * static_cast<double>(hits) / static_cast<double>(data.size()));
        if (validation) hist.val_oa.push_back(accuracy_percent(net, *validation, opts.threads));
        hist.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        if (opts.on_epoch) opts.on_epoch(epoch, hist);
    }
    return hist;
}

/// Stratified k-fold split: each class is shuffled (seeded) and dealt
/// round-robin across folds. Returns sample indices per fold.
inline std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& data, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw InvalidArgument("cross validation: need at least 2 folds");
    std::array<std::vector<std::size_t>, kNumClasses> by_class;
    for (std::size_t i = 0; i < data.size(); ++i) by_class[index_of(data[i].label)].push_back(i);
    Rng rng(mix_seed(seed, 3));
    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t next = 0;
    for (auto& idx : by_class) {
        if (!idx.empty() && idx.size() < folds)
            throw InvalidArgument("cross validation: a class has fewer samples than folds");
        rng.shuffle(idx.begin(), idx.end());
        for (std::size_t i : idx) out[next++ % folds].push_back(i);
    }
    for (auto& f : out) std::sort(f.begin(), f.end());
    return out;
}

struct FoldResult {
    std::vector<std::size_t> test_indices;
    std::vector<Prediction> predictions;
    TrainHistory history;
};

inline std::vector<FoldResult> cross_validate(ModelKind kind, const ModelConfig& cfg, const Dataset& data,
                                              std::size_t folds, const TrainOptions& opts = {}) {
    const auto split = stratified_folds(data, folds, cfg.seed);
    std::vector<FoldResult> out;
    for (std::size_t f = 0; f < folds; ++f) {
        Dataset train_set, test_set;
        std::vector<char> in_test(data.size(), 0);
        for (std::size_t i : split[f]) in_test[i] = 1;
        for (std::size_t i = 0; i < data.size(); ++i) (in_test[i] ? test_set : train_set).push_back(data[i]);
        auto net = make_network(kind, cfg);
        FoldResult r;
        r.history = train(*net, train_set, nullptr, opts);
        r.test_indices = split[f];
        r.predictions = predict_all(*net, test_set, opts.threads);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace ffcdnn::model

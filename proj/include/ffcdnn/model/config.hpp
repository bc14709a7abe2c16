#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ffcdnn/capsule/routing.hpp"
#include "ffcdnn/error.hpp"
#include "ffcdnn/ffc/fourier_conv.hpp"
#include "ffcdnn/model/classifier.hpp"
#include "ffcdnn/util/kv_config.hpp"

namespace ffcdnn::model {

struct ModelConfig {
    std::size_t k = 3;
    std::size_t steps = 52; // K1
    ffc::BandMask mask{2, 15};
    std::string pool_bands = "single"; // "single" or "lo-hi,lo-hi,..."
    std::size_t primary_dim = 8;       // d_p
    std::size_t class_dim = 16;        // d_c
    std::size_t routing_iters = 3;
    double transform_init_std = 0.05;
    MarginLossConfig margin{};
    std::size_t cnn_hidden = 64;

    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t batch_size = 32;
    std::size_t epochs = 30;
    std::uint64_t seed = 7;

    ffc::PoolBands bands() const {
        if (pool_bands == "single") return ffc::single_bin_bands(mask);
        ffc::PoolBands out;
        for (auto part : csv::split(pool_bands)) {
            const auto dash = part.find('-');
            long long lo = 0, hi = 0;
            if (dash == std::string_view::npos || !csv::parse_long(part.substr(0, dash), lo) ||
                !csv::parse_long(part.substr(dash + 1), hi) || lo < 0 || hi < 0)
                throw InvalidArgument("config: pool_bands entries must be lo-hi");
            out.push_back({static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)});
        }
        return out;
    }

    std::size_t k2() const { return bands().size(); }
    std::size_t branch_features() const { return k * k * k2(); }
    /// K3: capsules per branch = ceil(features / d_p), two branches.
    std::size_t k3() const { return 2 * ((branch_features() + primary_dim - 1) / primary_dim); }

    capsule::RoutingShape routing_shape() const { return {k3(), kNumClasses, primary_dim, class_dim}; }

    void validate() const {
        if (k == 0 || k % 2 == 0) throw InvalidArgument("config: k must be odd");
        if (steps < 2 || steps % 2 != 0) throw InvalidArgument("config: K1 must be even");
        ffc::validate_bands(steps, mask, bands());
        if (primary_dim == 0 || class_dim == 0) throw InvalidArgument("config: capsule dimensions must be positive");
        if (routing_iters < 1) throw InvalidArgument("config: routing_iters must be >= 1");
        if (batch_size == 0) throw InvalidArgument("config: batch_size must be positive");
        if (!(learning_rate > 0.0)) throw InvalidArgument("config: learning_rate must be positive");
    }

    static std::vector<std::string> keys() {
        return {"k", "K1", "band_low", "band_high", "pool_bands", "K2", "d_p", "d_c", "K3", "routing_iters",
                "transform_init_std", "margin_plus", "margin_minus", "lambda_down", "cnn_hidden", "learning_rate",
                "adam_beta1", "adam_beta2", "adam_eps", "batch_size", "epochs", "seed"};
    }

    /// Reads known keys; K2 and K3 are derived and only checked when present.
    static ModelConfig from(const KeyValues& kv) {
        ModelConfig c;
        c.k = kv.count("k", c.k);
        c.steps = kv.count("K1", c.steps);
        c.mask.low_bin = kv.count("band_low", c.mask.low_bin);
        c.mask.high_bin = kv.count("band_high", c.mask.high_bin);
        c.pool_bands = kv.get("pool_bands", c.pool_bands);
        c.primary_dim = kv.count("d_p", c.primary_dim);
        c.class_dim = kv.count("d_c", c.class_dim);
        c.routing_iters = kv.count("routing_iters", c.routing_iters);
        c.transform_init_std = kv.number("transform_init_std", c.transform_init_std);
        c.margin.m_plus = kv.number("margin_plus", c.margin.m_plus);
        c.margin.m_minus = kv.number("margin_minus", c.margin.m_minus);
        c.margin.lambda_down = kv.number("lambda_down", c.margin.lambda_down);
        c.cnn_hidden = kv.count("cnn_hidden", c.cnn_hidden);
        c.learning_rate = kv.number("learning_rate", c.learning_rate);
        c.adam_beta1 = kv.number("adam_beta1", c.adam_beta1);
        c.adam_beta2 = kv.number("adam_beta2", c.adam_beta2);
        c.adam_eps = kv.number("adam_eps", c.adam_eps);
        c.batch_size = kv.count("batch_size", c.batch_size);
        c.epochs = kv.count("epochs", c.epochs);
        c.seed = kv.count("seed", c.seed);
        c.validate();
        if (kv.has("K2") && kv.count("K2", 0) != c.k2())
            throw InvalidArgument("config: K2 = " + kv.get("K2", "") + " but pool_bands define " + std::to_string(c.k2()));
        if (kv.has("K3") && kv.count("K3", 0) != c.k3())
            throw InvalidArgument("config: K3 = " + kv.get("K3", "") + " but features group into " + std::to_string(c.k3()));
        return c;
    }

    void to(KeyValues& kv) const {
        kv.set("k", std::to_string(k));
        kv.set("K1", std::to_string(steps));
        kv.set("band_low", std::to_string(mask.low_bin));
        kv.set("band_high", std::to_string(mask.high_bin));
        kv.set("pool_bands", pool_bands);
        kv.set("K2", std::to_string(k2()));
        kv.set("d_p", std::to_string(primary_dim));
        kv.set("d_c", std::to_string(class_dim));
        kv.set("K3", std::to_string(k3()));
        kv.set("routing_iters", std::to_string(routing_iters));
        kv.set("transform_init_std", format_number(transform_init_std));
        kv.set("margin_plus", format_number(margin.m_plus));
        kv.set("margin_minus", format_number(margin.m_minus));
        kv.set("lambda_down", format_number(margin.lambda_down));
        kv.set("cnn_hidden", std::to_string(cnn_hidden));
        kv.set("learning_rate", format_number(learning_rate));
        kv.set("adam_beta1", format_number(adam_beta1));
        kv.set("adam_beta2", format_number(adam_beta2));
        kv.set("adam_eps", format_number(adam_eps));
        kv.set("batch_size", std::to_string(batch_size));
        kv.set("epochs", std::to_string(epochs));
        kv.set("seed", std::to_string(seed));
    }
};

} // namespace ffcdnn::model

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "ffcdnn/classes.hpp"
#include "ffcdnn/dataset.hpp"
#include "ffcdnn/error.hpp"
#include "ffcdnn/rng.hpp"
#include "ffcdnn/util/kv_config.hpp"
#include "ffcdnn/util/parallel.hpp"
#include "ffcdnn/vi/patches.hpp"

namespace ffcdnn::synth {

/// Inclusive range of DFT bin indices.
struct BinRange {
    std::size_t lo = 0;
    std::size_t hi = 0;

    std::size_t width() const { return hi - lo + 1; }
    bool contains(std::size_t j) const { return j >= lo && j <= hi; }
    std::string to_string() const { return std::to_string(lo) + "-" + std::to_string(hi); }

    static BinRange parse(std::string_view s) {
        const auto dash = s.find('-');
        long long lo = 0, hi = 0;
        if (dash == std::string_view::npos || !csv::parse_long(s.substr(0, dash), lo) ||
            !csv::parse_long(s.substr(dash + 1), hi) || lo < 0 || hi < lo)
            throw InvalidArgument("bin range '" + std::string(s) + "' is not lo-hi");
        return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
    }
};

/// Frequency signature of a stress class; Healthy carries none.
struct ClassSignature {
    StressClass label = StressClass::Healthy;
    bool stressed = false;
    BinRange lai{};
    BinRange lcc{};
    double gain = 1.0; // total in-band amplitude at severity 100

    const BinRange& band(vi::Channel ch) const { return ch == vi::Channel::LAI ? lai : lcc; }
};

struct SynthConfig {
    std::size_t samples = 1000;
    std::array<double, kNumClasses> class_mix{1.0 / 3, 1.0 / 3, 1.0 / 3};
    std::size_t k = 3;
    std::size_t steps = 52;
    double noise_sigma = 0.05;
    double severity_min = 40.0;
    double severity_max = 100.0;
    double signal_gain = 1.0;
    double lcc_scale = 0.2;      // VI_LCC amplitude relative to VI_LAI
    double drift_amplitude = 0.3; // bin 0/1 background
    double pixel_jitter = 0.1;    // relative per-pixel amplitude spread
    // Single-channel fluctuation inside a stress band, present regardless of
    // class; a stress class shows its band in both channels at once.
    double disturbance_prob = 0.5;
    double disturbance_gain = 1.0;
    BinRange yr_lai{2, 4};
    BinRange yr_lcc{2, 4};
    BinRange nd_lai{5, 15};
    BinRange nd_lcc{6, 13};
    std::uint64_t seed = 7;

    std::array<ClassSignature, kNumClasses> signatures() const {
        return {ClassSignature{StressClass::Healthy, false, {}, {}, signal_gain},
                ClassSignature{StressClass::YellowRust, true, yr_lai, yr_lcc, signal_gain},
                ClassSignature{StressClass::NitrogenDeficiency, true, nd_lai, nd_lcc, signal_gain}};
    }

    void validate() const {
        double sum = 0.0;
        for (double p : class_mix) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("class_mix: proportions must be non-negative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("class_mix: proportions must sum to 1");
        if (k == 0 || k % 2 == 0) throw InvalidArgument("synth: k must be odd");
        if (steps < 4) throw InvalidArgument("synth: K1 must be at least 4");
        for (const auto* b : {&yr_lai, &yr_lcc, &nd_lai, &nd_lcc})
            if (b->lo < 1 || b->hi > steps / 2 || b->hi < b->lo)
                throw InvalidArgument("synth: signature band " + b->to_string() + " outside 1.." + std::to_string(steps / 2));
        if (!(noise_sigma >= 0.0)) throw InvalidArgument("synth: noise_sigma must be non-negative");
        if (!(severity_min >= 20.0 && severity_min <= severity_max && severity_max <= 100.0))
            throw InvalidArgument("synth: need 20 <= severity_min <= severity_max <= 100 (stressed labels need DI >= 20)");
        if (!(disturbance_prob >= 0.0 && disturbance_prob <= 1.0)) throw InvalidArgument("synth: disturbance_prob must be in [0, 1]");
    }

    static std::vector<std::string> keys() {
        return {"samples", "class_mix", "k", "K1", "noise_sigma", "severity_min", "severity_max", "signal_gain",
                "lcc_scale", "drift_amplitude", "pixel_jitter", "disturbance_prob", "disturbance_gain",
                "yr_bins_lai", "yr_bins_lcc", "nd_bins_lai", "nd_bins_lcc", "seed"};
    }

    static SynthConfig from(const KeyValues& kv) {
        SynthConfig c;
        c.samples = kv.count("samples", c.samples);
        const auto mix = kv.numbers("class_mix", {c.class_mix.begin(), c.class_mix.end()});
        if (mix.size() != kNumClasses) throw InvalidArgument("class_mix: expected 3 proportions");
        std::copy(mix.begin(), mix.end(), c.class_mix.begin());
        c.k = kv.count("k", c.k);
        c.steps = kv.count("K1", c.steps);
        c.noise_sigma = kv.number("noise_sigma", c.noise_sigma);
        c.severity_min = kv.number("severity_min", c.severity_min);
        c.severity_max = kv.number("severity_max", c.severity_max);
        c.signal_gain = kv.number("signal_gain", c.signal_gain);
        c.lcc_scale = kv.number("lcc_scale", c.lcc_scale);
        c.drift_amplitude = kv.number("drift_amplitude", c.drift_amplitude);
        c.pixel_jitter = kv.number("pixel_jitter", c.pixel_jitter);
        c.disturbance_prob = kv.number("disturbance_prob", c.disturbance_prob);
        c.disturbance_gain = kv.number("disturbance_gain", c.disturbance_gain);
        if (kv.has("yr_bins_lai")) c.yr_lai = BinRange::parse(kv.get("yr_bins_lai", ""));
        if (kv.has("yr_bins_lcc")) c.yr_lcc = BinRange::parse(kv.get("yr_bins_lcc", ""));
        if (kv.has("nd_bins_lai")) c.nd_lai = BinRange::parse(kv.get("nd_bins_lai", ""));
        if (kv.has("nd_bins_lcc")) c.nd_lcc = BinRange::parse(kv.get("nd_bins_lcc", ""));
        c.seed = kv.count("seed", c.seed);
        c.validate();
        return c;
    }

    void to(KeyValues& kv) const {
        kv.set("samples", std::to_string(samples));
        kv.set("class_mix", format_number(class_mix[0]) + "," + format_number(class_mix[1]) + "," + format_number(class_mix[2]));
        kv.set("k", std::to_string(k));
        kv.set("K1", std::to_string(steps));
        kv.set("noise_sigma", format_number(noise_sigma));
        kv.set("severity_min", format_number(severity_min));
        kv.set("severity_max", format_number(severity_max));
        kv.set("signal_gain", format_number(signal_gain));
        kv.set("lcc_scale", format_number(lcc_scale));
        kv.set("drift_amplitude", format_number(drift_amplitude));
        kv.set("pixel_jitter", format_number(pixel_jitter));
        kv.set("disturbance_prob", format_number(disturbance_prob));
        kv.set("disturbance_gain", format_number(disturbance_gain));
        kv.set("yr_bins_lai", yr_lai.to_string());
        kv.set("yr_bins_lcc", yr_lcc.to_string());
        kv.set("nd_bins_lai", nd_lai.to_string());
        kv.set("nd_bins_lcc", nd_lcc.to_string());
        kv.set("seed", std::to_string(seed));
    }
};

/// Disease index rule: DI < 20 is healthy.
inline StressClass label_di(double di) {
    if (!(di >= 0.0 && di <= 100.0)) throw InvalidArgument("disease index must be in [0, 100]");
    return di < 20.0 ? StressClass::Healthy : StressClass::YellowRust;
}

enum class FertilizerMode { Controlled, Survey };

/// Controlled plots: >= 200 kg/ha is healthy. Field survey: < 150 kg/ha is
/// deficient.
inline StressClass label_fertilizer(double rate_kg_ha, FertilizerMode mode) {
    if (!(rate_kg_ha >= 0.0)) throw InvalidArgument("fertilizer rate must be non-negative");
    if (mode == FertilizerMode::Controlled) return rate_kg_ha >= 200.0 ? StressClass::Healthy : StressClass::NitrogenDeficiency;
    return rate_kg_ha < 150.0 ? StressClass::NitrogenDeficiency : StressClass::Healthy;
}

/// Green-up / senescence curve on t in [0, 1].
inline double double_logistic(double t, double vmin, double vmax, double sos, double eos, double rate) {
    const double up = 1.0 / (1.0 + std::exp(-(t - sos) / rate));
    const double down = 1.0 / (1.0 + std::exp(-(t - eos) / rate));
    return vmin + (vmax - vmin) * (up - down);
}

/// Adds sum over bins of a_j cos(2 pi j t / N + phi_j) with random phases and
/// equal per-bin amplitude total / sqrt(width), so the band's energy scales
/// with total^2 independently of its width.
inline void add_band(std::vector<double>& curve, BinRange band, double total, Rng& rng) {
    const double a = total / std::sqrt(static_cast<double>(band.width()));
    const double n = static_cast<double>(curve.size());
    for (std::size_t j = band.lo; j <= band.hi; ++j) {
        const double phi = rng.uniform(-std::numbers::pi, std::numbers::pi);
        for (std::size_t t = 0; t < curve.size(); ++t)
            curve[t] += a * std::cos(2.0 * std::numbers::pi * static_cast<double>(j * t) / n + phi);
    }
}

/// One patch for a given class and severity. The same seed and inputs always
/// give the same patch.
inline vi::AgentPatch synthesize(StressClass label, double severity, const SynthConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = cfg.steps;
    const auto sig = cfg.signatures()[index_of(label)];

    // Patch-level curves per channel, in VI_LAI units.
    std::array<std::vector<double>, vi::kChannels> common;
    const double vmin = rng.uniform(0.3, 0.6), vmax = rng.uniform(2.5, 3.5);
    const double sos = rng.uniform(0.2, 0.3), eos = rng.uniform(0.7, 0.8), rate = rng.uniform(0.05, 0.07);
    for (auto& curve : common) {
        curve.resize(n);
        for (std::size_t t = 0; t < n; ++t)
            curve[t] = double_logistic(static_cast<double>(t) / static_cast<double>(n), vmin, vmax, sos, eos, rate);
        add_band(curve, {0, 0}, cfg.drift_amplitude * rng.uniform(-1.0, 1.0), rng);
        add_band(curve, {1, 1}, cfg.drift_amplitude * rng.uniform(0.0, 1.0), rng);
    }
    if (sig.stressed && severity > 0.0)
        for (std::size_t ch = 0; ch < vi::kChannels; ++ch)
            add_band(common[ch], sig.band(static_cast<vi::Channel>(ch)), sig.gain * severity / 100.0, rng);
    if (cfg.disturbance_prob > 0.0 && rng.uniform() < cfg.disturbance_prob) {
        // Class-independent single-channel disturbance inside one of the
        // stress bands.
        const auto ch = static_cast<vi::Channel>(rng.index(2));
        const bool low = rng.index(2) == 0;
        const BinRange band = low ? (ch == vi::Channel::LAI ? cfg.yr_lai : cfg.yr_lcc)
                                  : (ch == vi::Channel::LAI ? cfg.nd_lai : cfg.nd_lcc);
        const double level = rng.uniform(cfg.severity_min, cfg.severity_max) / 100.0;
        add_band(common[static_cast<std::size_t>(ch)], band, cfg.disturbance_gain * level, rng);
    }

    vi::AgentPatch patch(cfg.k, n);
    for (std::size_t p = 0; p < patch.pixels(); ++p) {
        const double gain = 1.0 + cfg.pixel_jitter * rng.normal();
        for (std::size_t ch = 0; ch < vi::kChannels; ++ch) {
            const double scale = ch == 0 ? 1.0 : cfg.lcc_scale;
            for (std::size_t t = 0; t < n; ++t)
                patch.at(p / cfg.k, p % cfg.k, t, static_cast<vi::Channel>(ch)) =
                    scale * (gain * common[ch][t] + cfg.noise_sigma * rng.normal());
        }
    }
    return patch;
}

/// Largest-remainder allocation of n samples to the class mix.
inline std::array<std::size_t, kNumClasses> class_counts(std::size_t n, const std::array<double, kNumClasses>& mix) {
    std::array<std::size_t, kNumClasses> counts{};
    std::array<double, kNumClasses> rem{};
    std::size_t used = 0;
    for (std::size_t h = 0; h < kNumClasses; ++h) {
        const double exact = mix[h] * static_cast<double>(n);
        counts[h] = static_cast<std::size_t>(std::floor(exact));
        rem[h] = exact - static_cast<double>(counts[h]);
        used += counts[h];
    }
    while (used < n) {
        std::size_t best = 0;
        for (std::size_t h = 1; h < kNumClasses; ++h)
            if (rem[h] > rem[best]) best = h;
        ++counts[best];
        rem[best] = -1.0;
        ++used;
    }
    return counts;
}

/// Severity on [min, max] following Beta(2, 3), which leans toward moderate
/// values; drawn as the 2nd smallest of 4 uniforms.
inline double draw_severity(Rng& rng, double lo, double hi) {
    std::array<double, 4> u{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    std::sort(u.begin(), u.end());
    return lo + (hi - lo) * u[1];
}

/// Labelled dataset; ids are 0..n-1 in a seeded shuffled class order. Output
/// does not depend on the thread count.
inline Dataset generate(const SynthConfig& cfg, std::size_t threads = 1) {
    cfg.validate();
    const auto counts = class_counts(cfg.samples, cfg.class_mix);
    std::vector<StressClass> labels;
    for (std::size_t h = 0; h < kNumClasses; ++h) labels.insert(labels.end(), counts[h], class_from_index(h));
    Rng order(mix_seed(cfg.seed, 10));
    order.shuffle(labels.begin(), labels.end());

    Dataset data(cfg.samples);
    parallel_for(cfg.samples, threads, [&](std::size_t i) {
        const std::uint64_t s = mix_seed(mix_seed(cfg.seed, 11), i);
        Rng rng(s);
        Sample& out = data[i];
        out.id = i;
        out.label = labels[i];
        if (labels[i] != StressClass::Healthy) {
            out.severity = draw_severity(rng, cfg.severity_min, cfg.severity_max);
            if (labels[i] == StressClass::YellowRust && label_di(out.severity) != StressClass::YellowRust)
                throw NumericError("synth: yellow rust sample below the DI threshold");
            // Nitrogen severity is the deficit below the 200 kg/ha healthy rate.
            if (labels[i] == StressClass::NitrogenDeficiency &&
                label_fertilizer(200.0 * (1.0 - out.severity / 100.0), FertilizerMode::Controlled) != StressClass::NitrogenDeficiency)
                throw NumericError("synth: nitrogen sample at the healthy fertilizer rate");
        }
        out.patch = synthesize(out.label, out.severity, cfg, rng.next_u64());
    });
    return data;
}

} // namespace ffcdnn::synth

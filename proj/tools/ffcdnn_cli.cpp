// ffcdnn command-line entry point.
//
// Exit codes: 0 success, 2 input error, 3 numeric failure, 1 anything else.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ffcdnn/dataset.hpp"
#include "ffcdnn/eval/cda.hpp"
#include "ffcdnn/eval/interpret.hpp"
#include "ffcdnn/eval/metrics.hpp"
#include "ffcdnn/eval/timing.hpp"
#include "ffcdnn/model/serialize.hpp"
#include "ffcdnn/model/trainer.hpp"
#include "ffcdnn/numerics/convolution.hpp"
#include "ffcdnn/s2/series_io.hpp"
#include "ffcdnn/synth/generator.hpp"
#include "ffcdnn/util/manifest.hpp"
#include "ffcdnn/version.hpp"
#include "ffcdnn/vi/indices.hpp"
#include "ffcdnn/vi/patches.hpp"

namespace fs = std::filesystem;
using namespace ffcdnn;

namespace {

struct Settings {
    std::string config_path;
    std::size_t threads = 1;
    KeyValues kv;
    model::ModelConfig model;
    synth::SynthConfig synth;
    vi::PrefilterConfig prefilter;
};

std::vector<std::string> known_keys() {
    auto keys = model::ModelConfig::keys();
    for (auto& k : synth::SynthConfig::keys()) keys.push_back(k);
    for (const char* k : {"soil_slope", "clair_alpha", "wdvi_inf", "s2_band_mapping"}) keys.emplace_back(k);
    return keys;
}

/// Loads the config file (if any), applies FFCDNN_SEED, and builds every
/// module's config from the merged key set.
void resolve(Settings& s) {
    KeyValues kv;
    if (!s.config_path.empty()) kv = KeyValues::load(s.config_path);
    kv.require_known(known_keys());
    if (const char* env = std::getenv("FFCDNN_SEED")) {
        long long v = 0;
        if (!csv::parse_long(env, v) || v < 0) throw InvalidArgument("FFCDNN_SEED must be a non-negative integer");
        kv.set("seed", std::to_string(v));
    }
    s.model = model::ModelConfig::from(kv);
    s.synth = synth::SynthConfig::from(kv);
    s.prefilter.soil_slope = kv.number("soil_slope", s.prefilter.soil_slope);
    s.prefilter.clair_alpha = kv.number("clair_alpha", s.prefilter.clair_alpha);
    s.prefilter.wdvi_inf = kv.number("wdvi_inf", s.prefilter.wdvi_inf);
    if (kv.has("s2_band_mapping")) s.prefilter.mapping = vi::BandMapping::parse(kv.get("s2_band_mapping", ""));

    // Snapshot with every default filled in.
    KeyValues full;
    s.model.to(full);
    s.synth.to(full);
    full.set("seed", std::to_string(s.model.seed));
    full.set("soil_slope", format_number(s.prefilter.soil_slope));
    full.set("clair_alpha", format_number(s.prefilter.clair_alpha));
    full.set("wdvi_inf", format_number(s.prefilter.wdvi_inf));
    full.set("s2_band_mapping", s.prefilter.mapping.to_string());
    s.kv = full;
}

RunManifest start_manifest(const Settings& s, const std::string& command, int argc, char** argv) {
    RunManifest m;
    m.command = command;
    for (int i = 0; i < argc; ++i) m.argv.emplace_back(argv[i]);
    m.config = s.kv.to_string();
    m.seed = s.model.seed;
    if (!s.config_path.empty()) m.add_input(s.config_path);
    return m;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << text;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InvalidArgument("cannot create directory " + dir + ": " + ec.message());
}

std::string fmt(double v, int prec = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

// ---------------------------------------------------------------- commands

struct SimulateArgs {
    std::vector<std::string> spectra;
    std::string rsr, out;
    std::vector<long long> dates;
    long long row = 0, col = 0;
};

void cmd_simulate(const Settings&, const SimulateArgs& a, RunManifest& man) {
    const auto curves = s2::load_rsr(a.rsr);
    man.add_input(a.rsr);
    if (curves.size() != s2::kAllBands.size()) throw InvalidArgument(a.rsr + ": expected curves for all of B2..B8");
    if (!a.dates.empty() && a.dates.size() != a.spectra.size())
        throw InvalidArgument("--dates needs one entry per --spectra file");
    s2::PixelSeries px{a.row, a.col, {}};
    for (std::size_t i = 0; i < a.spectra.size(); ++i) {
        const auto spec = s2::load_spectrum(a.spectra[i]);
        man.add_input(a.spectra[i]);
        s2::Sentinel2Record rec{a.row, a.col, a.dates.empty() ? static_cast<long long>(i) : a.dates[i], {}};
        for (std::size_t b = 0; b < curves.size(); ++b) rec.bands[b] = s2::simulate_band(spec, curves[b]);
        px.records.push_back(rec);
    }
    std::sort(px.records.begin(), px.records.end(), [](auto& x, auto& y) { return x.date < y.date; });
    for (std::size_t i = 1; i < px.records.size(); ++i)
        if (px.records[i].date == px.records[i - 1].date) throw InvalidArgument("duplicate date " + std::to_string(px.records[i].date));
    s2::write_series(a.out, {px});
    man.add_output(a.out);
}

struct PrefilterArgs {
    std::string series, out;
};

void cmd_prefilter(const Settings& s, const PrefilterArgs& a, RunManifest& man) {
    const auto series = s2::load_series(a.series);
    man.add_input(a.series);
    const auto grid = vi::default_grid(series, s.model.steps);
    const auto patches = vi::build_patches(series, {s.model.k, s.model.steps}, grid, s.prefilter);
    ensure_dir(a.out);
    Dataset data;
    std::string pixels = "sample_id,row,col\n";
    for (std::size_t i = 0; i < patches.size(); ++i) {
        data.push_back({i, patches[i].patch, StressClass::Healthy, 0.0});
        pixels += std::to_string(i) + "," + std::to_string(patches[i].row) + "," + std::to_string(patches[i].col) + "\n";
    }
    write_patches(data, a.out + "/patches.csv");
    write_text(a.out + "/pixels.csv", pixels);
    man.add_output(a.out + "/patches.csv");
    man.add_output(a.out + "/pixels.csv");
}

struct GenArgs {
    std::string out;
    long long samples = -1;
    long long seed = -1;
};

void cmd_gen(Settings& s, const GenArgs& a, RunManifest& man) {
    if (a.samples >= 0) s.synth.samples = static_cast<std::size_t>(a.samples);
    if (a.seed >= 0) s.synth.seed = static_cast<std::uint64_t>(a.seed);
    KeyValues snap = s.kv;
    s.synth.to(snap);
    man.config = snap.to_string();
    man.seed = s.synth.seed;
    const auto data = synth::generate(s.synth, s.threads);
    ensure_dir(a.out);
    write_dataset_dir(data, a.out);
    man.add_output(a.out + "/patches.csv");
    man.add_output(a.out + "/labels.csv");
    std::printf("wrote %zu samples to %s\n", data.size(), a.out.c_str());
}

nlohmann::json history_json(const model::TrainHistory& h) {
    return {{"epochs", h.loss.size()}, {"loss", h.loss}, {"train_oa_percent", h.train_oa}, {"val_oa_percent", h.val_oa}};
}

struct TrainArgs {
    std::string data, out, validation;
    std::vector<std::string> ablation;
    std::string baseline;
    std::size_t cv = 0;
};

void cmd_train(const Settings& s, const TrainArgs& a, RunManifest& man) {
    std::vector<model::ModelKind> kinds;
    for (const auto& k : a.ablation) {
        if (k != "base" && k != "ffc" && k != "full") throw InvalidArgument("--ablation expects base|ffc|full");
        kinds.push_back(model::parse_kind(k));
    }
    if (!a.baseline.empty()) {
        if (a.baseline != "cnn") throw InvalidArgument("--baseline expects cnn");
        kinds.push_back(model::ModelKind::Cnn);
    }
    if (kinds.empty()) kinds.push_back(model::ModelKind::Full);

    const auto data = read_dataset_dir(a.data);
    man.add_input(a.data + "/patches.csv");
    man.add_input(a.data + "/labels.csv");
    Dataset val;
    if (!a.validation.empty()) {
        val = read_dataset_dir(a.validation);
        man.add_input(a.validation + "/patches.csv");
        man.add_input(a.validation + "/labels.csv");
    }
    ensure_dir(a.out);
    nlohmann::json timing = nlohmann::json::object();
    model::TrainOptions opts;
    opts.threads = s.threads;
    for (auto kind : kinds) {
        const std::string name = model::kind_name(kind);
        opts.on_epoch = [&](std::size_t e, const model::TrainHistory& h) {
            std::fprintf(stderr, "[%s] epoch %zu/%zu loss %.5f train OA %.2f%%%s\n", name.c_str(), e + 1, s.model.epochs,
                         h.loss.back(), h.train_oa.back(),
                         h.val_oa.empty() ? "" : (" val OA " + fmt(h.val_oa.back(), 4) + "%").c_str());
        };
        if (a.cv > 0) {
            const auto folds = model::cross_validate(kind, s.model, data, a.cv, opts);
            eval::ConfusionMatrix pooled;
            nlohmann::json jf = nlohmann::json::array();
            std::vector<double> secs;
            for (const auto& f : folds) {
                eval::ConfusionMatrix m;
                for (std::size_t i = 0; i < f.test_indices.size(); ++i) {
                    m.add(f.predictions[i].label, data[f.test_indices[i]].label);
                    pooled.add(f.predictions[i].label, data[f.test_indices[i]].label);
                }
                jf.push_back({{"test_samples", f.test_indices.size()}, {"oa_percent", eval::confusion_metrics(m).oa},
                              {"history", history_json(f.history)}});
                secs.push_back(f.history.total_seconds());
            }
            const auto rep = eval::confusion_metrics(pooled);
            nlohmann::json out = {{"model", name}, {"folds", jf}, {"pooled", eval::report_json(rep, pooled)}};
            const std::string path = a.out + "/cv_" + name + ".json";
            write_text(path, out.dump(2) + "\n");
            man.add_output(path);
            timing[name] = {{"fold_seconds", secs}};
            std::printf("%s: %zu-fold CV pooled OA %.2f%%\n", name.c_str(), a.cv, rep.oa);
            continue;
        }
        auto net = model::make_network(kind, s.model);
        const auto hist = model::train(*net, data, val.empty() ? nullptr : &val, opts);
        const std::string model_path = a.out + "/model_" + name + ".bin";
        const std::string hist_path = a.out + "/history_" + name + ".json";
        model::save_model(*net, model_path);
        write_text(hist_path, history_json(hist).dump(2) + "\n");
        man.add_output(model_path);
        man.add_output(hist_path);
        timing[name] = {{"seconds", hist.seconds}, {"total_seconds", hist.total_seconds()}};
        std::printf("%s: final loss %.5f, train OA %.2f%%, %.1f s\n", name.c_str(), hist.loss.back(), hist.train_oa.back(),
                    hist.total_seconds());
    }
    if (timing.contains("full") && timing.contains("cnn") && timing["full"].contains("total_seconds")) {
        const double ratio = timing["full"]["total_seconds"].get<double>() / timing["cnn"]["total_seconds"].get<double>();
        timing["full_over_cnn"] = ratio;
        std::printf("CT ratio full/cnn = %.3f\n", ratio);
    }
    write_text(a.out + "/timing.json", timing.dump(2) + "\n");
}

struct EvalArgs {
    std::string model, data, out, from_matrix;
    double ct_seconds = -1.0;
};

void cmd_eval(const Settings& s, const EvalArgs& a, RunManifest& man) {
    eval::ConfusionMatrix m;
    std::string predictions;
    if (!a.from_matrix.empty()) {
        m = eval::load_matrix_csv(a.from_matrix);
        man.add_input(a.from_matrix);
    } else {
        if (a.model.empty() || a.data.empty()) throw InvalidArgument("eval needs --model and --data, or --from-matrix");
        auto net = model::load_model(a.model);
        man.add_input(a.model);
        const auto data = read_dataset_dir(a.data);
        man.add_input(a.data + "/patches.csv");
        man.add_input(a.data + "/labels.csv");
        const auto preds = model::predict_all(*net, data, s.threads);
        predictions = "sample_id,actual,predicted,length_healthy,length_yellowrust,length_nitrogen,tie\n";
        for (std::size_t i = 0; i < data.size(); ++i) {
            m.add(preds[i].label, data[i].label);
            predictions += std::to_string(data[i].id) + "," + std::string(class_name(data[i].label)) + "," +
                           std::string(class_name(preds[i].label));
            for (double l : preds[i].lengths) predictions += "," + format_number(l);
            predictions += preds[i].tie ? ",1\n" : ",0\n";
        }
    }
    auto rep = eval::confusion_metrics(m);
    if (a.ct_seconds >= 0.0) rep.ct_seconds = a.ct_seconds;
    ensure_dir(a.out);
    write_text(a.out + "/report.json", eval::report_json(rep, m).dump(2) + "\n");
    write_text(a.out + "/report.txt", eval::report_text(rep, m));
    write_text(a.out + "/confusion.csv", eval::matrix_csv(m));
    for (const char* f : {"/report.json", "/report.txt", "/confusion.csv"}) man.add_output(a.out + f);
    if (!predictions.empty()) {
        write_text(a.out + "/predictions.csv", predictions);
        man.add_output(a.out + "/predictions.csv");
    }
    std::fputs(eval::report_text(rep, m).c_str(), stdout);
}

struct ExplainArgs {
    std::string model, data, out;
};

void cmd_explain(const Settings& s, const ExplainArgs& a, RunManifest& man) {
    auto net = model::load_model(a.model);
    man.add_input(a.model);
    const auto data = read_dataset_dir(a.data);
    man.add_input(a.data + "/patches.csv");
    man.add_input(a.data + "/labels.csv");
    ensure_dir(a.out);

    const auto reps = eval::representations(*net, data, s.threads);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(reps.empty() ? 0 : reps[0].size()));
    std::vector<int> labels;
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < reps[i].size(); ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = reps[i][j];
        labels.push_back(static_cast<int>(index_of(data[i].label)));
    }
    const auto cda = eval::cda_project(x, labels);
    std::string scores = "sample_id,label";
    for (Eigen::Index k = 0; k < cda.scores.cols(); ++k) scores += ",cd" + std::to_string(k + 1);
    scores += "\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        scores += std::to_string(data[i].id) + "," + std::string(class_name(data[i].label));
        for (Eigen::Index k = 0; k < cda.scores.cols(); ++k) scores += "," + format_number(cda.scores(static_cast<Eigen::Index>(i), k));
        scores += "\n";
    }
    std::string axes = "axis,fisher_ratio\n";
    for (std::size_t k = 0; k < cda.ratios.size(); ++k) axes += "cd" + std::to_string(k + 1) + "," + format_number(cda.ratios[k]) + "\n";
    write_text(a.out + "/cda_scores.csv", scores);
    write_text(a.out + "/cda_axes.csv", axes);
    man.add_output(a.out + "/cda_scores.csv");
    man.add_output(a.out + "/cda_axes.csv");

    const auto* full = dynamic_cast<const model::Ffcdnn*>(net.get());
    if (!full) {
        std::printf("CDA written; per-component R^2 needs a full capsule model\n");
        return;
    }
    const auto origins = eval::component_origins(*full);
    const auto sigs = s.synth.signatures();
    std::string r2 = "class,component,channel,pixel,bin_lo,bin_hi,r2,in_band\n";
    std::string summary = "class,in_band_mean,out_band_mean,gap,in_count,out_count\n";
    for (StressClass c : {StressClass::YellowRust, StressClass::NitrogenDeficiency}) {
        const auto res = eval::class_r2(*full, data, c, sigs[index_of(c)], s.threads);
        for (std::size_t i = 0; i < res.r2.size(); ++i) {
            const auto& o = origins[i];
            if (o.padding) continue;
            r2 += std::string(class_name(c)) + "," + std::to_string(i) + "," + (o.channel == vi::Channel::LAI ? "LAI" : "LCC") + "," +
                  std::to_string(o.pixel) + "," + std::to_string(o.bin_lo) + "," + std::to_string(o.bin_hi) + "," +
                  format_number(res.r2[i]) + "," + (res.in_band[i] ? (*res.in_band[i] ? "1" : "0") : "") + "\n";
        }
        summary += std::string(class_name(c)) + "," + format_number(res.in_band_mean) + "," + format_number(res.out_band_mean) +
                   "," + format_number(res.gap()) + "," + std::to_string(res.in_count) + "," + std::to_string(res.out_count) + "\n";
        std::printf("%s: in-band mean R^2 %.3f, out-of-band %.3f\n", std::string(class_name(c)).c_str(), res.in_band_mean,
                    res.out_band_mean);
    }
    write_text(a.out + "/r2_components.csv", r2);
    write_text(a.out + "/r2_summary.csv", summary);
    man.add_output(a.out + "/r2_components.csv");
    man.add_output(a.out + "/r2_summary.csv");
}

struct BenchArgs {
    std::vector<std::size_t> sizes{64, 256, 1024, 4096};
    std::size_t reps = 5;
    std::string out;
};

void cmd_bench(const Settings& s, const BenchArgs& a, RunManifest& man) {
    Rng rng(mix_seed(s.model.seed, 20));
    std::string csv_out = "n,fft_seconds,direct_seconds,direct_over_fft,fft_cv,direct_cv\n";
    std::optional<std::size_t> crossover;
    for (std::size_t n : a.sizes) {
        if (n == 0) throw InvalidArgument("bench sizes must be positive");
        std::vector<double> x(n), w(n);
        for (auto& v : x) v = rng.normal();
        for (auto& v : w) v = rng.normal();
        const DftPlan plan(n);
        // Repeat small sizes so each timed block lasts long enough to measure.
        const std::size_t inner = std::max<std::size_t>(1, 4'000'000 / (n * n));
        volatile double sink = 0.0;
        const auto fft = eval::time_repeated([&] {
            for (std::size_t i = 0; i < inner; ++i) sink = sink + circular_convolve_fft(plan, x, w)[0];
        }, a.reps);
        const auto direct = eval::time_repeated([&] {
            for (std::size_t i = 0; i < inner; ++i) sink = sink + circular_convolve_direct(x, w)[0];
        }, a.reps);
        const double tf = fft.min() / static_cast<double>(inner), td = direct.min() / static_cast<double>(inner);
        if (!crossover && tf < td) crossover = n;
        csv_out += std::to_string(n) + "," + fmt(tf) + "," + fmt(td) + "," + fmt(td / tf) + "," + fmt(fft.cv(), 3) + "," +
                   fmt(direct.cv(), 3) + "\n";
        std::printf("N=%-6zu fft %.3e s  direct %.3e s  ratio %.2f  (cv %.2f / %.2f)\n", n, tf, td, td / tf, fft.cv(), direct.cv());
    }
    if (crossover) std::printf("crossover: frequency-domain faster from N=%zu\n", *crossover);
    else std::printf("crossover: none within the tested sizes\n");
    csv_out += "# crossover," + (crossover ? std::to_string(*crossover) : std::string("none")) + "\n";
    if (!a.out.empty()) {
        write_text(a.out, csv_out);
        man.add_output(a.out);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier-convolution capsule network for crop stress classification"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);
    Settings s;
    bool print_config = false;
    app.add_option("--config", s.config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--threads", s.threads, "worker cap for prediction and generation")->check(CLI::Range(1, 256));
    app.add_flag("--print-config", print_config, "print the resolved configuration and exit");
    std::string manifest_path;
    app.add_option("--manifest", manifest_path, "manifest path (default: next to the outputs)");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate-bands", "integrate hyperspectra into Sentinel-2 bands B2..B8");
    c_sim->add_option("--spectra", sim.spectra, "spectrum CSV, one per date (repeatable)")->required();
    c_sim->add_option("--rsr", sim.rsr, "RSR CSV")->required();
    c_sim->add_option("--out", sim.out, "series CSV to write")->required();
    c_sim->add_option("--dates", sim.dates, "day-of-season per spectrum (default 0,1,...)")->delimiter(',');
    c_sim->add_option("--row", sim.row);
    c_sim->add_option("--col", sim.col);

    PrefilterArgs pre;
    auto* c_pre = app.add_subcommand("prefilter", "series CSV -> VI patches on the K1 grid");
    c_pre->add_option("--series", pre.series)->required();
    c_pre->add_option("--out", pre.out, "output directory")->required();

    GenArgs gen;
    auto* c_gen = app.add_subcommand("gen", "generate a labelled synthetic dataset");
    c_gen->add_option("--out", gen.out, "output directory")->required();
    c_gen->add_option("--samples", gen.samples, "override `samples`");
    c_gen->add_option("--seed", gen.seed, "override the generator seed");

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "train a model (or ablation variants / CNN baseline)");
    c_train->add_option("--data", tr.data, "dataset directory")->required();
    c_train->add_option("--out", tr.out, "output directory")->required();
    c_train->add_option("--validation", tr.validation, "validation dataset directory");
    c_train->add_option("--ablation", tr.ablation, "variants: base,ffc,full")->delimiter(',');
    c_train->add_option("--baseline", tr.baseline, "cnn");
    c_train->add_option("--cv", tr.cv, "run stratified k-fold cross validation instead");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "confusion matrix and accuracy report");
    c_eval->add_option("--model", ev.model);
    c_eval->add_option("--data", ev.data);
    c_eval->add_option("--out", ev.out, "output directory")->required();
    c_eval->add_option("--from-matrix", ev.from_matrix, "report on a count matrix CSV instead of a model");
    c_eval->add_option("--ct-seconds", ev.ct_seconds, "computing time to include in the report");

    ExplainArgs ex;
    auto* c_explain = app.add_subcommand("explain", "canonical discriminant scores and per-component R^2");
    c_explain->add_option("--model", ex.model)->required();
    c_explain->add_option("--data", ex.data)->required();
    c_explain->add_option("--out", ex.out, "output directory")->required();

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "frequency-domain vs direct circular convolution timing");
    c_bench->add_option("--sizes", bench.sizes)->delimiter(',');
    c_bench->add_option("--reps", bench.reps)->check(CLI::Range(1, 1000));
    c_bench->add_option("--out", bench.out, "timing CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        resolve(s);
        if (print_config) {
            std::fputs(s.kv.to_string().c_str(), stdout);
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::fputs(app.help().c_str(), stdout);
            return 2;
        }
        auto* sub = app.get_subcommands().front();
        auto man = start_manifest(s, sub->get_name(), argc, argv);
        std::string default_manifest;
        if (sub == c_sim) {
            cmd_simulate(s, sim, man);
            default_manifest = sim.out + ".manifest.json";
        } else if (sub == c_pre) {
            cmd_prefilter(s, pre, man);
            default_manifest = pre.out + "/manifest.json";
        } else if (sub == c_gen) {
            cmd_gen(s, gen, man);
            default_manifest = gen.out + "/manifest.json";
        } else if (sub == c_train) {
            cmd_train(s, tr, man);
            default_manifest = tr.out + "/manifest.json";
        } else if (sub == c_eval) {
            cmd_eval(s, ev, man);
            default_manifest = ev.out + "/manifest.json";
        } else if (sub == c_explain) {
            cmd_explain(s, ex, man);
            default_manifest = ex.out + "/manifest.json";
        } else if (sub == c_bench) {
            cmd_bench(s, bench, man);
            default_manifest = bench.out.empty() ? "" : bench.out + ".manifest.json";
        }
        const std::string mpath = manifest_path.empty() ? default_manifest : manifest_path;
        if (!mpath.empty()) man.write(mpath);
        return 0;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}

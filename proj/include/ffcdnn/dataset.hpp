#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "ffcdnn/classes.hpp"
#include "ffcdnn/error.hpp"
#include "ffcdnn/util/csv.hpp"
#include "ffcdnn/vi/patches.hpp"

namespace ffcdnn {

/// One labelled network input. Severity is in [0, 100]: disease index for
/// yellow rust, fertilizer deficit for nitrogen, 0 for healthy.
struct Sample {
    std::size_t id = 0;
    vi::AgentPatch patch;
    StressClass label = StressClass::Healthy;
    double severity = 0.0;
};

using Dataset = std::vector<Sample>;

inline constexpr const char* kPatchHeader = "sample_id,row,col,t,vi_lai,vi_lcc";
inline constexpr const char* kLabelHeader = "sample_id,label,severity";

namespace detail {

inline void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

} // namespace detail

/// Writes `sample_id,row,col,t,vi_lai,vi_lcc` rows; values use shortest
/// round-trip formatting so a reload is exact.
inline void write_patches(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + path);
    std::string buf = std::string(kPatchHeader) + "\n";
    for (const auto& s : data) {
        const auto& p = s.patch;
        for (std::size_t r = 0; r < p.k(); ++r)
            for (std::size_t c = 0; c < p.k(); ++c)
                for (std::size_t t = 0; t < p.steps(); ++t) {
                    buf += std::to_string(s.id) + ',' + std::to_string(r) + ',' + std::to_string(c) + ',' + std::to_string(t) + ',';
                    detail::append_number(buf, p.at(r, c, t, vi::Channel::LAI));
                    buf += ',';
                    detail::append_number(buf, p.at(r, c, t, vi::Channel::LCC));
                    buf += '\n';
                }
        if (buf.size() > (1u << 20)) {
            out << buf;
            buf.clear();
        }
    }
    out << buf;
    if (!out) throw InvalidArgument("failed writing " + path);
}

inline void write_labels(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + path);
    std::string buf = std::string(kLabelHeader) + "\n";
    for (const auto& s : data) {
        buf += std::to_string(s.id) + ',' + std::string(class_name(s.label)) + ',';
        detail::append_number(buf, s.severity);
        buf += '\n';
    }
    out << buf;
    if (!out) throw InvalidArgument("failed writing " + path);
}

/// Reads a labels file and the matching patch file. Patch extents are inferred
/// from the largest row/col/t and every cell must appear exactly once.
inline Dataset read_dataset(const std::string& patches_path, const std::string& labels_path) {
    Dataset data;
    std::map<std::size_t, std::size_t> index;
    {
        csv::Reader in(labels_path);
        std::vector<std::string_view> f;
        if (!in.next(f)) in.fail("empty labels file");
        const auto c_id = in.column(f, "sample_id"), c_label = in.column(f, "label"), c_sev = in.column(f, "severity");
        const auto width = f.size();
        while (in.next(f)) {
            if (f.size() != width) in.fail("expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()));
            const auto id = in.integer(f[c_id], "sample_id");
            if (id < 0) in.fail("negative sample_id");
            Sample s;
            s.id = static_cast<std::size_t>(id);
            try {
                s.label = parse_class(f[c_label]);
            } catch (const InvalidArgument& e) {
                in.fail(e.what());
            }
            s.severity = in.number(f[c_sev], "severity");
            if (s.severity < 0.0 || s.severity > 100.0) in.fail("severity outside [0, 100]");
            if (!index.emplace(s.id, data.size()).second) in.fail("duplicate sample_id " + std::to_string(s.id));
            data.push_back(std::move(s));
        }
    }

    struct Cell {
        std::size_t sample, r, c, t;
        double lai, lcc;
    };
    std::vector<Cell> cells;
    std::size_t k = 0, steps = 0;
    {
        csv::Reader in(patches_path);
        std::vector<std::string_view> f;
        if (!in.next(f)) in.fail("empty patch file");
        const std::size_t col[6] = {in.column(f, "sample_id"), in.column(f, "row"), in.column(f, "col"),
                                    in.column(f, "t"), in.column(f, "vi_lai"), in.column(f, "vi_lcc")};
        const auto width = f.size();
        while (in.next(f)) {
            if (f.size() != width) in.fail("expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()));
            long long ints[4];
            const char* names[4] = {"sample_id", "row", "col", "t"};
            for (int i = 0; i < 4; ++i) {
                ints[i] = in.integer(f[col[i]], names[i]);
                if (ints[i] < 0) in.fail(std::string("negative ") + names[i]);
            }
            const auto it = index.find(static_cast<std::size_t>(ints[0]));
            if (it == index.end()) in.fail("sample_id " + std::to_string(ints[0]) + " has no label");
            Cell cell{it->second, static_cast<std::size_t>(ints[1]), static_cast<std::size_t>(ints[2]),
                      static_cast<std::size_t>(ints[3]), in.number(f[col[4]], "vi_lai"), in.number(f[col[5]], "vi_lcc")};
            k = std::max({k, cell.r + 1, cell.c + 1});
            steps = std::max(steps, cell.t + 1);
            cells.push_back(cell);
        }
    }
    if (data.empty()) return data;
    if (cells.empty()) throw InvalidArgument(patches_path + ": no patch rows");

    for (auto& s : data) s.patch = vi::AgentPatch(k, steps);
    std::vector<unsigned char> seen(data.size() * k * k * steps, 0);
    for (const auto& cell : cells) {
        auto& flag = seen[((cell.sample * k + cell.r) * k + cell.c) * steps + cell.t];
        if (flag) throw InvalidArgument(patches_path + ": duplicate cell for sample " + std::to_string(data[cell.sample].id));
        flag = 1;
        data[cell.sample].patch.at(cell.r, cell.c, cell.t, vi::Channel::LAI) = cell.lai;
        data[cell.sample].patch.at(cell.r, cell.c, cell.t, vi::Channel::LCC) = cell.lcc;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw InvalidArgument(patches_path + ": incomplete patches (expected " + std::to_string(k) + "x" +
                              std::to_string(k) + "x" + std::to_string(steps) + " cells per sample)");
    return data;
}

inline Dataset read_dataset_dir(const std::string& dir) {
    return read_dataset(dir + "/patches.csv", dir + "/labels.csv");
}

inline void write_dataset_dir(const Dataset& data, const std::string& dir) {
    write_patches(data, dir + "/patches.csv");
    write_labels(data, dir + "/labels.csv");
}

} // namespace ffcdnn

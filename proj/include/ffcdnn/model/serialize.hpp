#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/model/factory.hpp"
#include "ffcdnn/model/network.hpp"
#include "ffcdnn/util/kv_config.hpp"

namespace ffcdnn::model {

// Layout (little-endian):
//   "FFCDNN01" | u32 version | u32 kind | u64 seed | u64 len, config text
//   u32 count | per tensor: u32 len, name | u32 rank | u64 extents | f64 values
inline constexpr char kModelMagic[8] = {'F', 'F', 'C', 'D', 'N', 'N', '0', '1'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

namespace detail {

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(std::istream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw InvalidArgument("model file " + path + " is truncated");
    return v;
}

inline std::string take_string(std::istream& in, const std::string& path, std::uint64_t limit) {
    const auto n = take<std::uint64_t>(in, path);
    if (n > limit) throw InvalidArgument("model file " + path + " is corrupt (string length " + std::to_string(n) + ")");
    std::string s(n, '\0');
    if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) throw InvalidArgument("model file " + path + " is truncated");
    return s;
}

inline void put_string(std::ostream& out, const std::string& s) {
    put<std::uint64_t>(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

} // namespace detail

inline std::string config_text(const ModelConfig& cfg) {
    KeyValues kv;
    cfg.to(kv);
    return kv.to_string();
}

inline void save_model(Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write model file " + path);
    out.write(kModelMagic, sizeof kModelMagic);
    detail::put<std::uint32_t>(out, kModelFormatVersion);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(net.kind()));
    detail::put<std::uint64_t>(out, net.config().seed);
    detail::put_string(out, config_text(net.config()));

    auto tensors = net.parameters();
    for (auto& b : net.buffers()) tensors.push_back(b);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        detail::put_string(out, t.name);
        detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(t.tensor->shape().size()));
        for (auto e : t.tensor->shape()) detail::put<std::uint64_t>(out, e);
        for (double v : t.tensor->values()) detail::put<double>(out, v);
    }
    if (!out) throw InvalidArgument("failed writing model file " + path);
}

inline std::unique_ptr<Network> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open model file " + path);
    char magic[sizeof kModelMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kModelMagic, sizeof magic) != 0)
        throw InvalidArgument(path + " is not a model file");
    const auto version = detail::take<std::uint32_t>(in, path);
    if (version != kModelFormatVersion)
        throw InvalidArgument("model file " + path + " has format version " + std::to_string(version) +
                              ", this build reads version " + std::to_string(kModelFormatVersion));
    const auto kind = detail::take<std::uint32_t>(in, path);
    if (kind > static_cast<std::uint32_t>(ModelKind::Cnn)) throw InvalidArgument("model file " + path + ": unknown kind");
    const auto seed = detail::take<std::uint64_t>(in, path);
    auto cfg = ModelConfig::from(KeyValues::parse(detail::take_string(in, path, 1 << 20), path));
    if (cfg.seed != seed) throw InvalidArgument("model file " + path + ": seed header disagrees with embedded config");

    auto net = make_network(static_cast<ModelKind>(kind), cfg);
    auto tensors = net->parameters();
    for (auto& b : net->buffers()) tensors.push_back(b);
    const auto count = detail::take<std::uint32_t>(in, path);
    if (count != tensors.size())
        throw InvalidArgument("model file " + path + ": expected " + std::to_string(tensors.size()) + " tensors, found " +
                              std::to_string(count));
    for (auto& t : tensors) {
        const auto name = detail::take_string(in, path, 256);
        if (name != t.name) throw InvalidArgument("model file " + path + ": expected tensor '" + t.name + "', found '" + name + "'");
        const auto rank = detail::take<std::uint32_t>(in, path);
        Shape shape(rank);
        for (auto& e : shape) e = detail::take<std::uint64_t>(in, path);
        if (shape != t.tensor->shape())
            throw InvalidArgument("model file " + path + ": tensor '" + name + "' has shape " + shape_string(shape) +
                                  ", expected " + shape_string(t.tensor->shape()));
        for (double& v : t.tensor->values()) v = detail::take<double>(in, path);
        if (!t.tensor->all_finite()) throw InvalidArgument("model file " + path + ": tensor '" + name + "' has non-finite values");
    }
    return net;
}

} // namespace ffcdnn::model

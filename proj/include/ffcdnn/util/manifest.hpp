#pragma once

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

#include "ffcdnn/error.hpp"
#include "ffcdnn/version.hpp"

namespace ffcdnn {

/// Hex SHA-256 of a file's bytes (requires linking libcrypto).
inline std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path + " for hashing");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw StateError("sha256: digest init failed");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Record of one CLI run. Inputs and outputs are listed with their SHA-256 so
/// two runs can be compared by digest.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::string config; // full key = value snapshot
    std::uint64_t seed = 0;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
    std::chrono::system_clock::time_point started = std::chrono::system_clock::now();

    void add_input(const std::string& path) { inputs[path] = sha256_file(path); }
    void add_output(const std::string& path) { outputs[path] = sha256_file(path); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool"] = "ffcdnn";
        j["version"] = kVersion;
        j["command"] = command;
        j["argv"] = argv;
        j["seed"] = seed;
        j["config"] = config;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        const auto now = std::chrono::system_clock::now();
        j["started_utc"] = utc_timestamp(started);
        j["finished_utc"] = utc_timestamp(now);
        j["wall_seconds"] = std::chrono::duration<double>(now - started).count();
        return j;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidArgument("cannot write " + path);
        out << to_json().dump(2) << "\n";
    }
};

} // namespace ffcdnn

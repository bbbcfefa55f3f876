#pragma once

// Run manifest: enough to re-run a command and check its outputs.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swirl/io.hpp"

namespace swirl {

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
    std::vector<std::string> command_line;
    std::map<std::string, std::uint64_t> seeds;
    /// Input file -> SHA-256.
    std::map<std::string, std::string> dataset_digests;
    std::string model;
    nlohmann::json params = nlohmann::json::object();
    /// Output file (relative to the manifest's directory) -> SHA-256.
    std::map<std::string, std::string> outputs;
    std::string version = kVersion;

    void add_input(const std::filesystem::path& p) { dataset_digests[p.generic_string()] = io::sha256_file(p); }

    void add_output(const std::filesystem::path& dir, const std::string& relative) {
        outputs[relative] = io::sha256_file(dir / relative);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command_line"] = command_line;
        j["seeds"] = seeds;
        j["dataset_digests"] = dataset_digests;
        j["model"] = model;
        j["params"] = params;
        j["outputs"] = outputs;
        j["version"] = version;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.command_line = j.at("command_line").get<std::vector<std::string>>();
        m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
        m.dataset_digests = j.at("dataset_digests").get<std::map<std::string, std::string>>();
        m.model = j.at("model").get<std::string>();
        m.params = j.at("params");
        m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
        m.version = j.at("version").get<std::string>();
        return m;
    }

    void write(const std::filesystem::path& path) const { io::write_file_atomic(path, to_json().dump(2) + "\n"); }
};

/// Files listed in `m.outputs` whose current digest differs (or that vanished).
inline std::vector<std::string> stale_outputs(const RunManifest& m, const std::filesystem::path& dir) {
    std::vector<std::string> bad;
    for (const auto& [rel, digest] : m.outputs) {
        const auto p = dir / rel;
        if (!std::filesystem::exists(p) || io::sha256_file(p) != digest) bad.push_back(rel);
    }
    return bad;
}

}  // namespace swirl

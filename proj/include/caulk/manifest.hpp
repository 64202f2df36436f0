#ifndef CAULK_MANIFEST_HPP
#define CAULK_MANIFEST_HPP

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "caulk/common.hpp"

namespace caulk {

inline constexpr const char* kToolVersion = "caulk 1.0.0";

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(bool(in), "cannot open file: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(bool(out), "cannot write file: " + path.string());
    out << content;
}

inline std::string iso8601_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

/// Per-run record: config hash, tool version, command, timestamps, and a
/// digest for every emitted file. Written last, as manifest.json.
struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string started_at;
    std::string finished_at;
    std::vector<std::pair<std::string, std::string>> files;  // (relative path, digest)

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["tool_version"] = kToolVersion;
        j["command"] = command;
        j["config_hash"] = config_hash;
        j["started_at"] = started_at;
        j["finished_at"] = finished_at;
        j["files"] = nlohmann::ordered_json::array();
        for (const auto& [path, digest] : files) j["files"].push_back({{"path", path}, {"digest", digest}});
        return j;
    }
};

/// Collects output files for one command run and writes the manifest at the
/// end. Re-running with the same config reproduces every byte except the
/// manifest timestamps.
class OutputDir {
  public:
    OutputDir(std::filesystem::path dir, std::string command, std::string hash)
        : dir_(std::move(dir)) {
        manifest_.command = std::move(command);
        manifest_.config_hash = std::move(hash);
        manifest_.started_at = iso8601_utc_now();
        std::filesystem::create_directories(dir_);
    }

    const std::filesystem::path& path() const { return dir_; }

    void emit(const std::string& name, const std::string& content) {
        write_file(dir_ / name, content);
        manifest_.files.emplace_back(name, hex64(fnv1a64(content)));
    }

    void finalize() {
        manifest_.finished_at = iso8601_utc_now();
        write_file(dir_ / "manifest.json", manifest_.to_json().dump(2) + "\n");
    }

  private:
    std::filesystem::path dir_;
    RunManifest manifest_;
};

/// Re-reads a manifest and checks every listed digest.
inline bool validate_manifest(const std::filesystem::path& dir) {
    auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    for (const auto& f : j.at("files")) {
        std::string content = read_file(dir / f.at("path").get<std::string>());
        if (hex64(fnv1a64(content)) != f.at("digest").get<std::string>()) return false;
    }
    return true;
}

}  // namespace caulk

#endif  // CAULK_MANIFEST_HPP

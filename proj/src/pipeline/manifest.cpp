#include "pipeline/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "common/error.hpp"

namespace vdea::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string file_checksum(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto got = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

json dir_checksums(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    json out = json::object();
    for (const auto& f : files) out[f.filename().string()] = file_checksum(f);
    return out;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                    const std::vector<fs::path>& inputs) {
    fs::create_directories(out_dir);
    json in = json::object();
    for (const auto& p : inputs) {
        if (fs::is_directory(p))
            in[p.string()] = dir_checksums(p);
        else
            in[p.string()] = file_checksum(p);
    }
    json manifest{{"command", command},
                  {"version", kToolVersion},
                  {"config", config},
                  {"inputs", in}};
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write manifest in " + out_dir.string());
    out << manifest.dump(2) << '\n';
}

}  // namespace vdea::pipeline

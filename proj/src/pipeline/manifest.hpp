#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace vdea::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string file_checksum(const std::filesystem::path& path);  // hex fnv1a64

// Checksums of a dataset/domains directory's content files, keyed by name.
nlohmann::json dir_checksums(const std::filesystem::path& dir);

// manifest.json: command, tool version, full config echo, input checksums.
// Deliberately timestamp-free so reruns are byte-identical.
void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const nlohmann::json& config,
                    const std::vector<std::filesystem::path>& inputs);

}  // namespace vdea::pipeline

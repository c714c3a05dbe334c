#pragma once

#include <filesystem>

#include "data/dataset.hpp"
#include "train/model.hpp"

namespace vdea::eval {

// TSV with one row per user of both domains: domain tag (S/T), user index,
// overlapped flag, then the D posterior-mean coordinates. Byte-deterministic
// for a fixed checkpoint and dataset.
void export_embeddings(const train::ModelParams& params, const data::PocdrDataset& ds,
                       const std::filesystem::path& path);

}  // namespace vdea::eval

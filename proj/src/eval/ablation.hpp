#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eval/discrepancy.hpp"
#include "eval/metrics.hpp"
#include "train/config.hpp"

namespace vdea::eval {

struct CellResult {
    std::string axis, value;
    train::RunConfig config;
    bool ok = false;
    bool cached = false;
    std::string error;
    double hr_src = 0.0, ndcg_src = 0.0, hr_tgt = 0.0, ndcg_tgt = 0.0;
    double d_a = 0.0;
};

// One train + test-split evaluation + proxy A-distance per value of the sweep
// axis (variant, lambda_vl, lambda_vg, clusters, latent_dim, k_u). Cells share
// the base config's seeds, run independently (up to `jobs` at once), cache
// their results under out_dir/cells keyed by a config/dataset checksum, and a
// failed cell does not stop the others.
std::vector<CellResult> run_ablation(const train::RunConfig& base,
                                     const std::filesystem::path& data_dir,
                                     const std::string& axis,
                                     const std::vector<std::string>& values,
                                     const std::filesystem::path& out_dir, int jobs);

// CSV: one row per cell with the config echo, metrics, and d_A.
void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<CellResult>& cells);

}  // namespace vdea::eval

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "data/synth.hpp"
#include "train/config.hpp"

namespace vdea::pipeline {

// High-level subcommand implementations. Every run echoes its configuration
// and input checksums into a manifest.json in the output directory.

void run_ingest(const std::filesystem::path& source_csv, const std::filesystem::path& target_csv,
                const std::filesystem::path& out_dir, double min_rating, int min_interactions);

void run_synth(const data::SynthConfig& cfg, const std::filesystem::path& out_dir);

void run_build(const std::filesystem::path& domains_dir, double ku, std::uint64_t seed,
               const std::filesystem::path& out_dir);

// Writes checkpoint.bin, trainlog.csv, best_epoch.json, and optional psi
// dumps into out_dir. data_dir is recorded in the manifest.
void run_train(const data::PocdrDataset& ds, const std::filesystem::path& data_dir,
               const train::RunConfig& cfg, const std::filesystem::path& out_dir);

// Writes metrics.csv for the requested split ("val" or "test").
void run_eval(const data::PocdrDataset& ds, const std::filesystem::path& data_dir,
              const std::filesystem::path& checkpoint, const std::string& split,
              const train::RunConfig& cfg, const std::filesystem::path& out_dir);

void run_ablate(const std::filesystem::path& data_dir, const train::RunConfig& base,
                const std::string& axis, const std::vector<std::string>& values, int jobs,
                const std::filesystem::path& out_dir);

void run_export(const data::PocdrDataset& ds, const std::filesystem::path& data_dir,
                const std::filesystem::path& checkpoint, const std::filesystem::path& out_file);

}  // namespace vdea::pipeline

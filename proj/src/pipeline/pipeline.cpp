#include "pipeline/pipeline.hpp"

#include <fstream>

#include "common/error.hpp"
#include "data/interactions.hpp"
#include "eval/ablation.hpp"
#include "eval/export.hpp"
#include "eval/metrics.hpp"
#include "pipeline/manifest.hpp"
#include "train/trainer.hpp"

namespace vdea::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

void run_ingest(const fs::path& source_csv, const fs::path& target_csv, const fs::path& out_dir,
                double min_rating, int min_interactions) {
    require(min_interactions >= 0, "ingest: min_interactions must be nonnegative");
    std::ifstream src(source_csv, std::ios::binary);
    if (!src) throw DataError("cannot read " + source_csv.string());
    std::ifstream tgt(target_csv, std::ios::binary);
    if (!tgt) throw DataError("cannot read " + target_csv.string());
    auto [source, target] = data::ingest_and_preprocess(src, tgt, min_rating, min_interactions);
    data::write_domains(out_dir, source, target);
    write_manifest(out_dir, "ingest",
                   json{{"source", source_csv.string()},
                        {"target", target_csv.string()},
                        {"min_rating", min_rating},
                        {"min_interactions", min_interactions}},
                   {source_csv, target_csv});
}

void run_synth(const data::SynthConfig& cfg, const fs::path& out_dir) {
    const data::PocdrDataset ds = data::generate_synthetic(cfg);
    data::write_dataset(out_dir, ds);
    write_manifest(out_dir, "synth",
                   json{{"clusters", cfg.prototype_count},
                        {"users", cfg.users},
                        {"items", cfg.items},
                        {"k_u", cfg.ku},
                        {"noise", cfg.noise},
                        {"seed", cfg.seed}},
                   {});
}

void run_build(const fs::path& domains_dir, double ku, std::uint64_t seed,
               const fs::path& out_dir) {
    auto [source, target] = data::read_domains(domains_dir);
    const data::PocdrDataset ds =
        data::build_pocdr_dataset(std::move(source), std::move(target), ku, seed);
    data::write_dataset(out_dir, ds);
    write_manifest(out_dir, "build",
                   json{{"source_data", domains_dir.string()}, {"k_u", ku}, {"seed", seed}},
                   {domains_dir});
}

void run_train(const data::PocdrDataset& ds, const fs::path& data_dir,
               const train::RunConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::optional<fs::path> psi_dir;
    if (cfg.dump_psi) {
        psi_dir = out_dir / "psi";
        fs::create_directories(*psi_dir);
    }
    const train::TrainResult result =
        train::train(cfg, ds, psi_dir ? &*psi_dir : nullptr);
    train::save_checkpoint(out_dir / "checkpoint.bin", result.params);
    train::write_train_log_csv(out_dir / "trainlog.csv", result.log);
    {
        std::ofstream out(out_dir / "best_epoch.json", std::ios::binary);
        out << json{{"best_epoch", result.best_epoch}, {"best_val_hr", result.best_score}}.dump(2)
            << '\n';
    }
    write_manifest(out_dir, "train",
                   json{{"data", data_dir.string()}, {"config", train::to_json(cfg)}},
                   {data_dir});
}

void run_eval(const data::PocdrDataset& ds, const fs::path& data_dir, const fs::path& checkpoint,
              const std::string& split, const train::RunConfig& cfg, const fs::path& out_dir) {
    require(split == "val" || split == "test", "eval: split must be val or test");
    const train::ModelParams params = train::load_checkpoint(checkpoint);
    if (params.source_encoder.input_dim() != ds.source.item_count() ||
        params.target_encoder.input_dim() != ds.target.item_count())
        throw DataError("checkpoint item dimensions (" +
                        std::to_string(params.source_encoder.input_dim()) + ", " +
                        std::to_string(params.target_encoder.input_dim()) +
                        ") do not match dataset (" + std::to_string(ds.source.item_count()) +
                        ", " + std::to_string(ds.target.item_count()) + ")");
    const eval::RankingProtocol protocol{cfg.top_k, cfg.negatives, cfg.eval_seed,
                                         cfg.full_catalog};
    const eval::MetricsReport report = eval::evaluate_topk(
        params, ds, split == "test" ? eval::Split::test : eval::Split::val, protocol);
    fs::create_directories(out_dir);
    eval::write_metrics_csv(out_dir / "metrics.csv", report,
                            split == "test" ? eval::Split::test : eval::Split::val);
    write_manifest(out_dir, "eval",
                   json{{"data", data_dir.string()},
                        {"checkpoint", checkpoint.string()},
                        {"split", split},
                        {"protocol",
                         json{{"k", protocol.k},
                              {"negatives", protocol.negatives},
                              {"seed", protocol.seed},
                              {"full_catalog", protocol.full_catalog}}}},
                   {data_dir, checkpoint});
}

void run_ablate(const fs::path& data_dir, const train::RunConfig& base, const std::string& axis,
                const std::vector<std::string>& values, int jobs, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const auto cells = eval::run_ablation(base, data_dir, axis, values, out_dir, jobs);
    eval::write_ablation_csv(out_dir / "ablation.csv", cells);
    write_manifest(out_dir, "ablate",
                   json{{"data", data_dir.string()},
                        {"axis", axis},
                        {"values", values},
                        {"jobs", jobs},
                        {"config", train::to_json(base)}},
                   {data_dir});
}

void run_export(const data::PocdrDataset& ds, const fs::path& data_dir,
                const fs::path& checkpoint, const fs::path& out_file) {
    const train::ModelParams params = train::load_checkpoint(checkpoint);
    if (params.source_encoder.input_dim() != ds.source.item_count() ||
        params.target_encoder.input_dim() != ds.target.item_count())
        throw DataError("checkpoint does not match dataset dimensions");
    if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
    eval::export_embeddings(params, ds, out_file);
    const fs::path manifest_dir =
        out_file.has_parent_path() ? out_file.parent_path() : fs::path(".");
    write_manifest(manifest_dir, "export-embeddings",
                   json{{"data", data_dir.string()},
                        {"checkpoint", checkpoint.string()},
                        {"out", out_file.string()}},
                   {data_dir, checkpoint});
}

}  // namespace vdea::pipeline

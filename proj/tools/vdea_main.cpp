// Command-line front end; all functionality goes through the C API.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>

#include "vdea/vdea.h"

namespace {

using nlohmann::json;

const char* status_class(vdea_status s) {
    switch (s) {
        case VDEA_OK: return "ok";
        case VDEA_ERR_USAGE: return "usage";
        case VDEA_ERR_DATA: return "data";
        case VDEA_ERR_NUMERIC: return "numeric";
        case VDEA_ERR_INTERNAL: return "internal";
    }
    return "internal";
}

int finish(vdea_status s) {
    if (s != VDEA_OK)
        std::fprintf(stderr, "error: class=%s msg=\"%s\"\n", status_class(s), vdea_last_error());
    return static_cast<int>(s);
}

struct DatasetHandle {
    vdea_dataset* ds = nullptr;
    ~DatasetHandle() { vdea_dataset_close(ds); }
};

// Merged config document: file values first, explicitly set flags on top.
struct ConfigBuilder {
    std::string config_path;
    json overrides = json::object();

    std::string build() const {
        json merged = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path, std::ios::binary);
            if (!in) throw CLI::ValidationError("--config", "cannot read " + config_path);
            try {
                merged = json::parse(in);
            } catch (const json::parse_error& e) {
                throw CLI::ValidationError("--config", std::string("invalid JSON: ") + e.what());
            }
        }
        for (auto it = overrides.begin(); it != overrides.end(); ++it)
            merged[it.key()] = it.value();
        return merged.dump();
    }
};

void add_seed_flags(CLI::App* cmd, ConfigBuilder& cfg) {
    cmd->add_option_function<std::uint64_t>(
        "--data-seed", [&cfg](const std::uint64_t& v) { cfg.overrides["data_seed"] = v; },
        "Dataset/rebuild seed");
    cmd->add_option_function<std::uint64_t>(
        "--model-seed", [&cfg](const std::uint64_t& v) { cfg.overrides["model_seed"] = v; },
        "Weight/EM/Sinkhorn seed");
    cmd->add_option_function<std::uint64_t>(
        "--noise-seed", [&cfg](const std::uint64_t& v) { cfg.overrides["noise_seed"] = v; },
        "Reparameterization/batch seed");
    cmd->add_option_function<std::uint64_t>(
        "--eval-seed", [&cfg](const std::uint64_t& v) { cfg.overrides["eval_seed"] = v; },
        "Negative-sampling seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VDEA cross-domain recommendation toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::simple);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Binarize and filter two rating CSVs");
    std::string in_source, in_target, in_out;
    double min_rating = 4.0;
    int min_interactions = 5;
    ingest->add_option("--source", in_source, "Source-domain ratings CSV")->required();
    ingest->add_option("--target", in_target, "Target-domain ratings CSV")->required();
    ingest->add_option("--out", in_out, "Output directory")->required();
    ingest->add_option("--min-rating", min_rating, "Positive-feedback threshold (default 4)");
    ingest->add_option("--min-interactions", min_interactions,
                       "Minimum positives per user/item (default 5)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dual-domain dataset");
    std::string sy_out;
    int sy_clusters = 4, sy_users = 600, sy_items = 200;
    double sy_ku = 0.3, sy_noise = 0.5;
    std::uint64_t sy_seed = 0;
    synth->add_option("--out", sy_out, "Output directory")->required();
    synth->add_option("--clusters", sy_clusters, "Latent prototype count")->required();
    synth->add_option("--users", sy_users, "Users per domain")->required();
    synth->add_option("--items", sy_items, "Items per domain")->required();
    synth->add_option("--ku", sy_ku, "Overlapped user ratio")->required();
    synth->add_option("--seed", sy_seed, "Generation seed")->required();
    synth->add_option("--noise", sy_noise, "Perturbation level (default 0.5)");

    // build
    auto* build = app.add_subcommand("build", "Overlap sampling and 8:1:1 split");
    std::string b_domains, b_out;
    double b_ku = 0.3;
    std::uint64_t b_seed = 0;
    build->add_option("--source-data", b_domains, "Ingested domain directory")->required();
    build->add_option("--ku", b_ku, "Overlapped user ratio")->required();
    build->add_option("--seed", b_seed, "Overlap/split seed")->required();
    build->add_option("--out", b_out, "Output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "Train a model on a dataset");
    std::string t_data, t_out, t_variant;
    ConfigBuilder t_cfg;
    train->add_option("--data", t_data, "Dataset directory")->required();
    train->add_option("--config", t_cfg.config_path, "JSON config file");
    train->add_option("--variant", t_variant, "full|base|local|global");
    train->add_option("--out", t_out, "Output directory")->required();
    add_seed_flags(train, t_cfg);

    // eval
    auto* eval = app.add_subcommand("eval", "Rank held-out positives with a checkpoint");
    std::string e_data, e_ckpt, e_split, e_out;
    ConfigBuilder e_cfg;
    eval->add_option("--data", e_data, "Dataset directory")->required();
    eval->add_option("--checkpoint", e_ckpt, "Checkpoint file")->required();
    eval->add_option("--split", e_split, "val|test")->required()
        ->check(CLI::IsMember({"val", "test"}));
    eval->add_option("--out", e_out, "Output directory")->required();
    eval->add_option("--config", e_cfg.config_path, "JSON config file (protocol fields)");
    add_seed_flags(eval, e_cfg);

    // ablate
    auto* ablate = app.add_subcommand("ablate", "Sweep one axis and tabulate metrics");
    std::string a_data, a_axis, a_values, a_out, a_variant;
    ConfigBuilder a_cfg;
    int a_jobs = 1;
    ablate->add_option("--data", a_data, "Dataset directory")->required();
    ablate->add_option("--config", a_cfg.config_path, "JSON config file");
    ablate->add_option("--sweep", a_axis,
                       "Axis: variant|lambda_vl|lambda_vg|clusters|latent_dim|k_u")->required();
    ablate->add_option("--values", a_values, "Comma-separated sweep values")->required();
    ablate->add_option("--out", a_out, "Output directory")->required();
    ablate->add_option("--jobs", a_jobs, "Concurrent cells (default 1)");
    ablate->add_option("--variant", a_variant, "Base variant for non-variant sweeps");
    add_seed_flags(ablate, a_cfg);

    // export-embeddings
    auto* exp = app.add_subcommand("export-embeddings", "Dump posterior-mean user embeddings");
    std::string x_data, x_ckpt, x_out;
    exp->add_option("--data", x_data, "Dataset directory")->required();
    exp->add_option("--checkpoint", x_ckpt, "Checkpoint file")->required();
    exp->add_option("--out", x_out, "Output TSV file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::fprintf(stderr, "error: class=usage msg=\"%s\"\n", e.what());
        return 2;
    }

    try {
        if (*ingest)
            return finish(vdea_ingest(in_source.c_str(), in_target.c_str(), in_out.c_str(),
                                      min_rating, min_interactions));
        if (*synth)
            return finish(vdea_synth(sy_out.c_str(), sy_clusters, sy_users, sy_items, sy_ku,
                                     sy_noise, sy_seed));
        if (*build)
            return finish(vdea_build(b_domains.c_str(), b_ku, b_seed, b_out.c_str()));
        if (*train) {
            DatasetHandle h;
            if (auto s = vdea_dataset_open(t_data.c_str(), &h.ds); s != VDEA_OK) return finish(s);
            const std::string cfg = t_cfg.build();
            return finish(vdea_train(h.ds, cfg.c_str(),
                                     t_variant.empty() ? nullptr : t_variant.c_str(),
                                     t_out.c_str()));
        }
        if (*eval) {
            DatasetHandle h;
            if (auto s = vdea_dataset_open(e_data.c_str(), &h.ds); s != VDEA_OK) return finish(s);
            const std::string cfg = e_cfg.build();
            return finish(vdea_evaluate(h.ds, e_ckpt.c_str(), e_split.c_str(), cfg.c_str(),
                                        e_out.c_str()));
        }
        if (*ablate) {
            DatasetHandle h;
            if (auto s = vdea_dataset_open(a_data.c_str(), &h.ds); s != VDEA_OK) return finish(s);
            if (!a_variant.empty()) a_cfg.overrides["variant"] = a_variant;
            const std::string cfg = a_cfg.build();
            return finish(vdea_ablate(h.ds, cfg.c_str(), a_axis.c_str(), a_values.c_str(),
                                      a_jobs, a_out.c_str()));
        }
        if (*exp) {
            DatasetHandle h;
            if (auto s = vdea_dataset_open(x_data.c_str(), &h.ds); s != VDEA_OK) return finish(s);
            return finish(vdea_export_embeddings(h.ds, x_ckpt.c_str(), x_out.c_str()));
        }
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: class=usage msg=\"%s\"\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: class=internal msg=\"%s\"\n", e.what());
        return 1;
    }
    return 0;
}

#include "vdea/vdea.h"

#include <filesystem>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "data/dataset.hpp"
#include "data/synth.hpp"
#include "pipeline/manifest.hpp"
#include "pipeline/pipeline.hpp"
#include "train/config.hpp"

// The opaque handle carries the loaded dataset plus its directory, which the
// pipeline records in manifests.
struct vdea_dataset {
    std::filesystem::path dir;
    vdea::data::PocdrDataset ds;
};

namespace {

thread_local std::string g_last_error;

vdea_status fail(vdea_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

vdea_status map_error_class(vdea::ErrorClass cls) {
    switch (cls) {
        case vdea::ErrorClass::contract: return VDEA_ERR_USAGE;
        case vdea::ErrorClass::data: return VDEA_ERR_DATA;
        case vdea::ErrorClass::numeric: return VDEA_ERR_NUMERIC;
        case vdea::ErrorClass::internal: return VDEA_ERR_INTERNAL;
    }
    return VDEA_ERR_INTERNAL;
}

template <typename Fn>
vdea_status guard(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return VDEA_OK;
    } catch (const vdea::Error& e) {
        return fail(map_error_class(e.error_class()), e.what());
    } catch (const std::exception& e) {
        return fail(VDEA_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(VDEA_ERR_INTERNAL, "unknown error");
    }
}

std::string require_cstr(const char* s, const char* what) {
    if (s == nullptr || *s == '\0')
        throw vdea::ContractError(std::string(what) + " must not be null or empty");
    return s;
}

vdea::train::RunConfig parse_config(const char* config_json, const char* variant) {
    vdea::train::RunConfig cfg;
    if (config_json != nullptr && *config_json != '\0') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw vdea::ContractError(std::string("config: invalid JSON: ") + e.what());
        }
        cfg = vdea::train::parse_run_config(j, cfg);
    }
    if (variant != nullptr && *variant != '\0')
        cfg.variant = vdea::train::parse_variant(variant);
    return cfg;
}

}  // namespace

extern "C" {

const char* vdea_version(void) { return vdea::pipeline::kToolVersion; }

const char* vdea_last_error(void) { return g_last_error.c_str(); }

vdea_status vdea_ingest(const char* source_csv, const char* target_csv, const char* out_dir,
                        double min_rating, int min_interactions) {
    return guard([&] {
        vdea::pipeline::run_ingest(require_cstr(source_csv, "source_csv"),
                                   require_cstr(target_csv, "target_csv"),
                                   require_cstr(out_dir, "out_dir"), min_rating,
                                   min_interactions);
    });
}

vdea_status vdea_synth(const char* out_dir, int clusters, int users, int items, double k_u,
                       double noise, uint64_t seed) {
    return guard([&] {
        vdea::data::SynthConfig cfg;
        cfg.prototype_count = clusters;
        cfg.users = users;
        cfg.items = items;
        cfg.ku = k_u;
        cfg.noise = noise;
        cfg.seed = seed;
        vdea::pipeline::run_synth(cfg, require_cstr(out_dir, "out_dir"));
    });
}

vdea_status vdea_build(const char* domains_dir, double k_u, uint64_t seed, const char* out_dir) {
    return guard([&] {
        vdea::pipeline::run_build(require_cstr(domains_dir, "domains_dir"), k_u, seed,
                                  require_cstr(out_dir, "out_dir"));
    });
}

vdea_status vdea_dataset_open(const char* dir, vdea_dataset** out) {
    return guard([&] {
        if (out == nullptr) throw vdea::ContractError("dataset_open: out must not be null");
        const std::filesystem::path path = require_cstr(dir, "dir");
        auto handle = std::make_unique<vdea_dataset>();
        handle->dir = path;
        handle->ds = vdea::data::read_dataset(path);
        *out = handle.release();
    });
}

void vdea_dataset_close(vdea_dataset* ds) { delete ds; }

vdea_status vdea_dataset_get_info(const vdea_dataset* ds, vdea_dataset_info* info) {
    return guard([&] {
        if (ds == nullptr || info == nullptr)
            throw vdea::ContractError("dataset_get_info: null argument");
        info->source_users = ds->ds.source.user_count();
        info->source_items = ds->ds.source.item_count();
        info->source_nnz = ds->ds.source.nnz();
        info->target_users = ds->ds.target.user_count();
        info->target_items = ds->ds.target.item_count();
        info->target_nnz = ds->ds.target.nnz();
        info->overlapped = ds->ds.overlap.pairs.size();
        info->k_u = ds->ds.ku;
        info->has_labels = ds->ds.has_labels() ? 1 : 0;
    });
}

vdea_status vdea_train(const vdea_dataset* ds, const char* config_json, const char* variant,
                       const char* out_dir) {
    return guard([&] {
        if (ds == nullptr) throw vdea::ContractError("train: dataset must not be null");
        vdea::pipeline::run_train(ds->ds, ds->dir, parse_config(config_json, variant),
                                  require_cstr(out_dir, "out_dir"));
    });
}

vdea_status vdea_evaluate(const vdea_dataset* ds, const char* checkpoint_path, const char* split,
                          const char* config_json, const char* out_dir) {
    return guard([&] {
        if (ds == nullptr) throw vdea::ContractError("evaluate: dataset must not be null");
        vdea::pipeline::run_eval(ds->ds, ds->dir, require_cstr(checkpoint_path, "checkpoint"),
                                 require_cstr(split, "split"),
                                 parse_config(config_json, nullptr),
                                 require_cstr(out_dir, "out_dir"));
    });
}

vdea_status vdea_ablate(const vdea_dataset* ds, const char* config_json, const char* axis,
                        const char* values_csv, int jobs, const char* out_dir) {
    return guard([&] {
        if (ds == nullptr) throw vdea::ContractError("ablate: dataset must not be null");
        const std::string values_str = require_cstr(values_csv, "values");
        std::vector<std::string> values;
        std::string cur;
        for (char c : values_str) {
            if (c == ',') {
                if (!cur.empty()) values.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) values.push_back(cur);
        vdea::pipeline::run_ablate(ds->dir, parse_config(config_json, nullptr),
                                   require_cstr(axis, "axis"), values, jobs,
                                   require_cstr(out_dir, "out_dir"));
    });
}

vdea_status vdea_export_embeddings(const vdea_dataset* ds, const char* checkpoint_path,
                                   const char* out_file) {
    return guard([&] {
        if (ds == nullptr) throw vdea::ContractError("export: dataset must not be null");
        vdea::pipeline::run_export(ds->ds, ds->dir, require_cstr(checkpoint_path, "checkpoint"),
                                   require_cstr(out_file, "out_file"));
    });
}

}  // extern "C"

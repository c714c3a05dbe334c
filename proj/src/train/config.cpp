#include "train/config.hpp"

#include <set>

#include "common/error.hpp"

namespace vdea::train {

using nlohmann::json;

Variant parse_variant(const std::string& name) {
    if (name == "full") return Variant::full;
    if (name == "base") return Variant::base;
    if (name == "local") return Variant::local;
    if (name == "global") return Variant::global;
    throw ContractError("unknown variant '" + name + "' (expected full|base|local|global)");
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::base: return "base";
        case Variant::local: return "local";
        case Variant::global: return "global";
    }
    return "full";
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ContractError(std::string("config: bad value for key '") + key + "'");
        }
    }
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "batch_size",    "latent_dim",     "hidden_dim",     "clusters",
        "epsilon",       "beta_max",       "lambda_vl",      "lambda_vg",
        "learning_rate", "pretrain_epochs", "train_epochs",  "anneal_epochs",
        "patience",      "data_seed",      "model_seed",     "noise_seed",
        "variant",       "sinkhorn_outer", "sinkhorn_inner", "sinkhorn_tol",
        "dump_psi",      "top_k",          "negatives",      "eval_seed",
        "full_catalog"};
    return keys;
}

}  // namespace

RunConfig parse_run_config(const json& j, RunConfig base) {
    require(j.is_object(), "config: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known_keys().count(it.key()))
            throw ContractError("config: unknown key '" + it.key() + "'");
    RunConfig c = base;
    read_field(j, "batch_size", c.batch_size);
    read_field(j, "latent_dim", c.latent_dim);
    read_field(j, "hidden_dim", c.hidden_dim);
    read_field(j, "clusters", c.clusters);
    read_field(j, "epsilon", c.epsilon);
    read_field(j, "beta_max", c.beta_max);
    read_field(j, "lambda_vl", c.lambda_vl);
    read_field(j, "lambda_vg", c.lambda_vg);
    read_field(j, "learning_rate", c.learning_rate);
    read_field(j, "pretrain_epochs", c.pretrain_epochs);
    read_field(j, "train_epochs", c.train_epochs);
    read_field(j, "anneal_epochs", c.anneal_epochs);
    read_field(j, "patience", c.patience);
    read_field(j, "data_seed", c.data_seed);
    read_field(j, "model_seed", c.model_seed);
    read_field(j, "noise_seed", c.noise_seed);
    if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
    read_field(j, "sinkhorn_outer", c.sinkhorn_outer);
    read_field(j, "sinkhorn_inner", c.sinkhorn_inner);
    read_field(j, "sinkhorn_tol", c.sinkhorn_tol);
    read_field(j, "dump_psi", c.dump_psi);
    read_field(j, "top_k", c.top_k);
    read_field(j, "negatives", c.negatives);
    read_field(j, "eval_seed", c.eval_seed);
    read_field(j, "full_catalog", c.full_catalog);
    validate(c);
    return c;
}

json to_json(const RunConfig& c) {
    return json{{"batch_size", c.batch_size},
                {"latent_dim", c.latent_dim},
                {"hidden_dim", c.hidden_dim},
                {"clusters", c.clusters},
                {"epsilon", c.epsilon},
                {"beta_max", c.beta_max},
                {"lambda_vl", c.lambda_vl},
                {"lambda_vg", c.lambda_vg},
                {"learning_rate", c.learning_rate},
                {"pretrain_epochs", c.pretrain_epochs},
                {"train_epochs", c.train_epochs},
                {"anneal_epochs", c.anneal_epochs},
                {"patience", c.patience},
                {"data_seed", c.data_seed},
                {"model_seed", c.model_seed},
                {"noise_seed", c.noise_seed},
                {"variant", variant_name(c.variant)},
                {"sinkhorn_outer", c.sinkhorn_outer},
                {"sinkhorn_inner", c.sinkhorn_inner},
                {"sinkhorn_tol", c.sinkhorn_tol},
                {"dump_psi", c.dump_psi},
                {"top_k", c.top_k},
                {"negatives", c.negatives},
                {"eval_seed", c.eval_seed},
                {"full_catalog", c.full_catalog}};
}

void validate(const RunConfig& c) {
    require(c.batch_size > 0, "config: batch_size must be positive");
    require(c.latent_dim > 0 && c.hidden_dim > 0, "config: dimensions must be positive");
    require(c.clusters > 0, "config: clusters must be positive");
    require(c.epsilon > 0, "config: epsilon must be positive");
    require(c.beta_max >= 0, "config: beta_max must be nonnegative");
    require(c.lambda_vl >= 0 && c.lambda_vg >= 0, "config: lambdas must be nonnegative");
    require(c.learning_rate > 0, "config: learning_rate must be positive");
    require(c.pretrain_epochs >= 0 && c.train_epochs >= 0 && c.anneal_epochs >= 0,
            "config: epoch counts must be nonnegative");
    require(c.patience >= 0, "config: patience must be nonnegative");
    require(c.sinkhorn_outer > 0 && c.sinkhorn_inner > 0 && c.sinkhorn_tol > 0,
            "config: sinkhorn settings must be positive");
    require(c.top_k >= 1, "config: top_k must be at least 1");
    require(c.negatives >= c.top_k, "config: negatives must be at least top_k");
}

}  // namespace vdea::train

#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>

namespace vdea::train {

enum class Variant { full, base, local, global };

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v);

// Flat run configuration: training hyperparameters plus the ranking protocol.
// Defaults follow the reference setup (N=256, D=128, K=30, eps=0.1,
// beta_max=0.2, lambda_vl=0.7, lambda_vg=1.0, Adam at 1e-3, KL annealed over
// 50 epochs).
struct RunConfig {
    int batch_size = 256;
    int latent_dim = 128;
    int hidden_dim = 600;
    int clusters = 30;
    double epsilon = 0.1;
    double beta_max = 0.2;
    double lambda_vl = 0.7;
    double lambda_vg = 1.0;
    double learning_rate = 1e-3;
    int pretrain_epochs = 20;
    int train_epochs = 100;
    int anneal_epochs = 50;
    int patience = 10;  // early stop after this many stagnant epochs; 0 disables
    std::uint64_t data_seed = 1;
    std::uint64_t model_seed = 2;
    std::uint64_t noise_seed = 3;
    Variant variant = Variant::full;
    int sinkhorn_outer = 10;
    int sinkhorn_inner = 50;
    double sinkhorn_tol = 1e-6;
    bool dump_psi = false;

    int top_k = 5;
    int negatives = 99;
    std::uint64_t eval_seed = 4;
    bool full_catalog = false;
};

// Strict parse over `base`: unknown keys are rejected, absent keys keep the
// base value.
RunConfig parse_run_config(const nlohmann::json& j, RunConfig base = {});
nlohmann::json to_json(const RunConfig& c);
void validate(const RunConfig& c);

}  // namespace vdea::train

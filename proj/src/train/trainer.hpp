#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "data/dataset.hpp"
#include "train/config.hpp"
#include "train/model.hpp"

namespace vdea::train {

struct EpochRecord {
    int epoch = 0;
    double l_vr = 0.0, l_va = 0.0, l_vg = 0.0, total = 0.0, beta = 0.0;
    double hr5_src = 0.0, ndcg5_src = 0.0, hr5_tgt = 0.0, ndcg5_tgt = 0.0;
    double seconds = 0.0;
};

struct TrainResult {
    ModelParams params;  // best-validation checkpoint
    std::vector<EpochRecord> log;
    int best_epoch = -1;
    double best_score = 0.0;  // mean of the two domains' validation HR@k
};

// Linear KL ramp from 0 to beta_max over anneal_epochs.
double beta_schedule(int epoch, int anneal_epochs, double beta_max);

// Which loss terms a variant contributes; a zero weight drops its term
// entirely so the zero-lambda path is step-for-step identical to `base`.
struct TermGates {
    bool local = false;
    bool global = false;
};
TermGates loss_gates(Variant v, double lambda_vl, double lambda_vg);

double total_loss(double l_vr, double l_va, double l_vg, double lambda_vl, double lambda_vg,
                  Variant v);

// Reconstruction-only warm start for both autoencoders followed by an EM fit
// of each domain's mixture prior over the resulting user embeddings.
// `pretrain_trace`, when given, receives the mean batch loss of every epoch.
ModelParams pretrain_and_init(const RunConfig& cfg, const data::PocdrDataset& ds,
                              std::vector<double>* pretrain_trace = nullptr);

// Full training loop: per epoch one GDOT solve on the current priors (when
// the variant uses the global term), per batch the composite loss, backward,
// and one Adam step over every parameter group. Keeps the checkpoint with the
// best mean validation HR@k.
TrainResult train(const RunConfig& cfg, const data::PocdrDataset& ds,
                  const std::filesystem::path* psi_dump_dir = nullptr);

// CSV: epoch,l_vr,l_va,l_vg,total,beta,hr5_src,ndcg5_src,hr5_tgt,ndcg5_tgt,seconds
void write_train_log_csv(const std::filesystem::path& path,
                         const std::vector<EpochRecord>& log);

// Posterior means of every user's training row, M x D.
ad::Tensor encode_all_users(const vae::EncoderParams& enc,
                            const std::vector<std::vector<std::uint32_t>>& train_rows,
                            std::size_t item_count);

}  // namespace vdea::train

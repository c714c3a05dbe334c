#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "data/dataset.hpp"
#include "train/config.hpp"
#include "vae/mlp.hpp"
#include "vae/mog.hpp"

namespace vdea::train {

struct ModelParams {
    vae::EncoderParams source_encoder, target_encoder;
    vae::DecoderParams source_decoder, target_decoder;
    vae::MoGPrior source_prior, target_prior;

    // Stable (name, tensor) enumeration; the checkpoint writes this order.
    std::vector<std::pair<std::string, ad::Tensor*>> named();
    std::vector<std::pair<std::string, const ad::Tensor*>> named() const;

    std::vector<ad::Tensor*> all_params();
    std::vector<ad::Tensor*> autoencoder_params();  // pretraining: no priors

    std::size_t latent_dim() const { return source_encoder.latent_dim(); }
};

ModelParams init_model(const RunConfig& cfg, std::size_t source_items, std::size_t target_items);

// Checkpoint: magic "VDEA", u32 version, u32 tensor count, then per tensor
// u32 name length, UTF-8 name, u32 rank, u64 dims, little-endian f64 payload.
// Round trips are bitwise lossless.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

// Shape checks against the run configuration and dataset; names both sides in
// the error message.
void validate_model_shapes(const ModelParams& params, const RunConfig& cfg,
                           const data::PocdrDataset& ds);

}  // namespace vdea::train

#pragma once

#include <span>
#include <vector>

#include "ad/tape.hpp"
#include "common/rng.hpp"

namespace vdea::vae {

struct DenseLayer {
    ad::Tensor weight;  // in x out
    ad::Tensor bias;    // 1 x out
};

// items -> hidden (tanh) -> 2D linear heads; columns [0, D) are the mean,
// [D, 2D) the log-variance.
struct EncoderParams {
    DenseLayer hidden;
    DenseLayer heads;
    std::size_t input_dim() const { return hidden.weight.rows(); }
    std::size_t latent_dim() const { return heads.weight.cols() / 2; }
};

// D -> hidden (tanh) -> items (sigmoid).
struct DecoderParams {
    DenseLayer hidden;
    DenseLayer output;
    std::size_t latent_dim() const { return hidden.weight.rows(); }
    std::size_t output_dim() const { return output.weight.cols(); }
};

EncoderParams make_encoder(std::size_t items, std::size_t hidden, std::size_t latent,
                           rng::Engine& eng);
DecoderParams make_decoder(std::size_t latent, std::size_t hidden, std::size_t items,
                           rng::Engine& eng);

struct EncoderVars {
    ad::Var hidden_w, hidden_b, heads_w, heads_b;
};
struct DecoderVars {
    ad::Var hidden_w, hidden_b, output_w, output_b;
};
EncoderVars bind(ad::Tape& tape, EncoderParams& p);
DecoderVars bind(ad::Tape& tape, DecoderParams& p);

// Posterior moments of one batch; sigma = exp(log_var / 2).
struct GaussianEmbedding {
    ad::Var mu, log_var, sigma;
};

struct EncodeResult {
    GaussianEmbedding gaussian;
    ad::Var z;
};

// Z = mu + eps (.) sigma with eps an externally drawn N(0, I) constant, so
// gradients reach mu and log_var but not the noise. The log-variance head is
// clamped to [-10, 10].
EncodeResult encode_reparameterize(ad::Tape& tape, const EncoderVars& enc, ad::Var x,
                                   const ad::Tensor& eps_noise);

// Bernoulli means, strictly inside (0, 1).
ad::Var decode(ad::Tape& tape, const DecoderVars& dec, ad::Var z);

// Tape-free forward passes for evaluation (noise-free: z = posterior mean).
std::vector<double> encode_mean(const EncoderParams& p, std::span<const double> row);
std::vector<double> decode_probs(const DecoderParams& p, std::span<const double> z);

}  // namespace vdea::vae

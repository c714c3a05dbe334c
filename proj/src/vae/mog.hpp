#pragma once

#include <cstdint>
#include <vector>

#include "ad/tape.hpp"

namespace vdea::vae {

// Mixture-of-Gaussians latent prior of one domain. The mixing weights are
// stored as free logits (softmax keeps them on the simplex) and the component
// scales as log-variances (exp keeps them positive), so no projection is ever
// needed after an optimizer step.
struct MoGPrior {
    ad::Tensor logits;    // 1 x K
    ad::Tensor means;     // K x D
    ad::Tensor log_vars;  // K x D

    std::size_t components() const { return logits.cols(); }
    std::size_t latent_dim() const { return means.cols(); }
    std::vector<double> weights() const;  // softmax(logits)
    ad::Tensor sigmas() const;            // exp(log_vars / 2), K x D
};

MoGPrior make_uniform_prior(std::size_t components, std::size_t latent_dim);

// Bound parameters plus derived nodes shared by every loss on the tape.
struct MoGVars {
    ad::Var logits, means, log_vars;
    ad::Var log_weights;  // 1 x K
    ad::Var variances;    // K x D
    ad::Var sigmas;       // K x D
};
MoGVars bind(ad::Tape& tape, MoGPrior& prior);

// gamma[i][c] = pi_c N(z_i | comp c) / sum_c' pi_c' N(z_i | comp c'), computed
// as a log-space softmax so no row can underflow to zero.
ad::Var cluster_responsibilities(ad::Tape& tape, ad::Var z, const MoGVars& prior);

struct EmOptions {
    int max_iterations = 100;
    double tol = 1e-6;         // stop when the log-likelihood gain drops below
    double sigma_floor = 1e-3;
    int max_retries = 5;       // degenerate-cluster reseeding attempts
    std::uint64_t seed = 0;
};

struct EmResult {
    MoGPrior prior;
    std::vector<double> log_likelihood;  // one entry per EM iteration
};

// Diagonal-covariance EM warm start with k-means++ seeding. Clusters that
// lose all mass are re-seeded at the point farthest from the current centers.
EmResult init_prior_from_latents(const ad::Tensor& latents, std::size_t components,
                                 const EmOptions& opt);

}  // namespace vdea::vae

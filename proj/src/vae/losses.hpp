#pragma once

#include "ad/tape.hpp"
#include "vae/mlp.hpp"
#include "vae/mog.hpp"

namespace vdea::vae {

// Binary cross-entropy summed over items, averaged over the batch. x holds
// {0,1} targets; x_hat probabilities in (0,1).
ad::Var reconstruction_loss(ad::Tape& tape, ad::Var x, ad::Var x_hat);

// Exact mean-field KL( N(mu, sigma^2) x gamma || MoG prior ), averaged over
// the batch. gamma rows are a distribution over components; the result is
// nonnegative for any such gamma.
ad::Var mog_kl(ad::Tape& tape, const GaussianEmbedding& posterior, ad::Var gamma,
               const MoGVars& prior);

struct DomainTerms {
    ad::Var x;
    ad::Var x_hat;
    GaussianEmbedding posterior;
    ad::Var gamma;
};

// L_VR over both domains: reconstruction plus beta-weighted KL each.
ad::Var vr_loss(ad::Tape& tape, const DomainTerms& source, const MoGVars& source_prior,
                const DomainTerms& target, const MoGVars& target_prior, double beta);

}  // namespace vdea::vae

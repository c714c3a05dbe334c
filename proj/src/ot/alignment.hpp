#pragma once

#include <cstdint>
#include <vector>

#include "ad/tape.hpp"

namespace vdea::ot {

// L_VA: sum over aligned row pairs of the squared 2-Wasserstein distance
// between the per-user posteriors. `aligned[i]` marks row i of the source
// block as the same user as row i of the target block. Gradients flow into
// both embeddings.
ad::Var local_alignment_loss(ad::Tape& tape, ad::Var source_mu, ad::Var source_sigma,
                             ad::Var target_mu, ad::Var target_sigma,
                             const std::vector<std::uint8_t>& aligned);

// L_VG: sum_ij plan_ij * W2(source component i, target component j). The
// transport plan is a constant; gradients flow into the component means and
// sigmas only.
ad::Var global_alignment_loss(ad::Tape& tape, ad::Var source_means, ad::Var source_sigmas,
                              ad::Var target_means, ad::Var target_sigmas,
                              const ad::Tensor& plan);

}  // namespace vdea::ot

#include "ot/alignment.hpp"

#include "common/error.hpp"

namespace vdea::ot {

using namespace ad;

Var local_alignment_loss(Tape& tape, Var source_mu, Var source_sigma, Var target_mu,
                         Var target_sigma, const std::vector<std::uint8_t>& aligned) {
    const std::size_t n = source_mu.rows();
    require(target_mu.rows() == n && aligned.size() == n,
            "local_alignment_loss: row count mismatch");
    require(source_mu.cols() == target_mu.cols(),
            "local_alignment_loss: latent width mismatch");
    Tensor mask(n, 1);
    for (std::size_t i = 0; i < n; ++i) mask.at(i, 0) = aligned[i] ? 1.0 : 0.0;
    Var pair_dist = add(row_sum(square(sub(source_mu, target_mu))),
                        row_sum(square(sub(source_sigma, target_sigma))));
    return sum(mul(tape.constant(std::move(mask)), pair_dist));
}

Var global_alignment_loss(Tape& tape, Var source_means, Var source_sigmas, Var target_means,
                          Var target_sigmas, const Tensor& plan) {
    const std::size_t k = source_means.rows();
    require(target_means.rows() == k && plan.rows() == k && plan.cols() == k,
            "global_alignment_loss: component count mismatch");
    require(source_means.cols() == target_means.cols(),
            "global_alignment_loss: latent width mismatch");
    // W2[i][j] = |mS_i|^2 + |mT_j|^2 - 2 mS_i . mT_j, plus the sigma analogue.
    auto pairwise = [&](Var a, Var b) {
        Var cross = mul_scalar(matmul(a, transpose(b)), -2.0);
        return add(add(cross, transpose(row_sum(square(b)))), row_sum(square(a)));
    };
    Var w2 = add(pairwise(source_means, target_means), pairwise(source_sigmas, target_sigmas));
    return sum(mul(tape.constant(plan), w2));
}

}  // namespace vdea::ot

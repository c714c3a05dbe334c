#include "vae/losses.hpp"

#include <vector>

#include "common/error.hpp"

namespace vdea::vae {

using namespace ad;

namespace {
constexpr double kEps = 1e-10;
}

Var reconstruction_loss(Tape& tape, Var x, Var x_hat) {
    require(x.rows() == x_hat.rows() && x.cols() == x_hat.cols(),
            "reconstruction_loss: shape mismatch");
    Var one = tape.scalar(1.0);
    Var pos = mul(x, log(add_scalar(x_hat, kEps)));
    Var neg_term = mul(sub(one, x), log(add_scalar(sub(one, x_hat), kEps)));
    return mean(neg(row_sum(add(pos, neg_term))));
}

Var mog_kl(Tape& tape, const GaussianEmbedding& posterior, Var gamma, const MoGVars& prior) {
    (void)tape;
    const std::size_t k = prior.means.rows();
    const std::size_t d = prior.means.cols();
    require(posterior.mu.cols() == d, "mog_kl: latent width mismatch");
    require(gamma.rows() == posterior.mu.rows() && gamma.cols() == k,
            "mog_kl: responsibility shape mismatch");

    Var post_var = exp(posterior.log_var);  // N x D
    // Q[i][c] = 0.5 sum_d( log prior_var + (post_var + (mu - prior_mu)^2) / prior_var )
    std::vector<Var> cols;
    cols.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        Var mean_c = slice(prior.means, c, c + 1, 0, d);
        Var var_c = slice(prior.variances, c, c + 1, 0, d);
        Var log_var_c = slice(prior.log_vars, c, c + 1, 0, d);
        Var quad = row_sum(
            divide(add(post_var, square(sub(posterior.mu, mean_c))), add_scalar(var_c, kEps)));
        Var col = mul_scalar(add(quad, row_sum(log_var_c)), 0.5);
        cols.push_back(col);
    }
    Var q = concat_cols(cols);  // N x K
    Var log_gamma = log(add_scalar(gamma, kEps));
    Var assignment = sub(log_gamma, prior.log_weights);  // log(gamma / pi), broadcast over rows
    Var per_user = row_sum(mul(gamma, add(q, assignment)));
    Var entropy_term = mul_scalar(row_sum(add_scalar(posterior.log_var, 1.0)), 0.5);
    return mean(sub(per_user, entropy_term));
}

Var vr_loss(Tape& tape, const DomainTerms& source, const MoGVars& source_prior,
            const DomainTerms& target, const MoGVars& target_prior, double beta) {
    require(beta >= 0.0, "vr_loss: beta must be nonnegative");
    Var loss = add(reconstruction_loss(tape, source.x, source.x_hat),
                   reconstruction_loss(tape, target.x, target.x_hat));
    if (beta > 0.0) {
        Var kl = add(mog_kl(tape, source.posterior, source.gamma, source_prior),
                     mog_kl(tape, target.posterior, target.gamma, target_prior));
        loss = add(loss, mul_scalar(kl, beta));
    }
    return loss;
}

}  // namespace vdea::vae

#include "vae/mog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace vdea::vae {

using namespace ad;

namespace {
constexpr double kEps = 1e-10;
constexpr double kLog2Pi = 1.8378770664093453;
}  // namespace

std::vector<double> MoGPrior::weights() const {
    std::vector<double> w(logits.values());
    double m = -std::numeric_limits<double>::infinity();
    for (double x : w) m = std::max(m, x);
    double z = 0.0;
    for (double& x : w) {
        x = std::exp(x - m);
        z += x;
    }
    for (double& x : w) x /= z;
    return w;
}

Tensor MoGPrior::sigmas() const {
    Tensor s(log_vars.rows(), log_vars.cols());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::exp(0.5 * log_vars[i]);
    return s;
}

MoGPrior make_uniform_prior(std::size_t components, std::size_t latent_dim) {
    require(components >= 1 && latent_dim >= 1, "prior: sizes must be positive");
    MoGPrior p;
    p.logits = Tensor(1, components);
    p.means = Tensor(components, latent_dim);
    p.log_vars = Tensor(components, latent_dim);
    p.logits.requires_grad = true;
    p.means.requires_grad = true;
    p.log_vars.requires_grad = true;
    return p;
}

MoGVars bind(Tape& tape, MoGPrior& prior) {
    MoGVars v;
    v.logits = tape.param(prior.logits);
    v.means = tape.param(prior.means);
    v.log_vars = tape.param(prior.log_vars);
    v.log_weights = log(add_scalar(softmax(v.logits, 1), kEps));
    v.variances = exp(v.log_vars);
    v.sigmas = exp(mul_scalar(v.log_vars, 0.5));
    return v;
}

Var cluster_responsibilities(Tape& tape, Var z, const MoGVars& prior) {
    const std::size_t k = prior.means.rows();
    const std::size_t d = prior.means.cols();
    require(z.cols() == d, "responsibilities: latent width mismatch");
    std::vector<Var> cols;
    cols.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        Var mean_c = slice(prior.means, c, c + 1, 0, d);
        Var log_var_c = slice(prior.log_vars, c, c + 1, 0, d);
        Var var_c = slice(prior.variances, c, c + 1, 0, d);
        Var quad = row_sum(divide(square(sub(z, mean_c)), add_scalar(var_c, kEps)));
        Var log_det = add_scalar(row_sum(log_var_c), static_cast<double>(d) * kLog2Pi);
        Var log_density = mul_scalar(add(quad, log_det), -0.5);
        cols.push_back(add(log_density, slice(prior.log_weights, 0, 1, c, c + 1)));
    }
    return softmax(concat_cols(cols), 1);
}

namespace {

double sq_dist(const Tensor& data, std::size_t row, const std::vector<double>& center) {
    const std::size_t d = data.cols();
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = data.at(row, j) - center[j];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

EmResult init_prior_from_latents(const Tensor& latents, std::size_t components,
                                 const EmOptions& opt) {
    const std::size_t m = latents.rows();
    const std::size_t d = latents.cols();
    require(components >= 1, "em: need at least one component");
    require(m >= components, "em: need at least as many points as components");
    const double var_floor = opt.sigma_floor * opt.sigma_floor;

    rng::Engine eng(rng::mix(opt.seed, 0xe3aULL));

    // k-means++ seeding
    std::vector<std::vector<double>> centers;
    centers.reserve(components);
    auto row_of = [&](std::size_t r) {
        return std::vector<double>(latents.data() + r * d, latents.data() + (r + 1) * d);
    };
    centers.push_back(row_of(eng.below(m)));
    std::vector<double> min_d2(m, 0.0);
    while (centers.size() < components) {
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, sq_dist(latents, i, c));
            min_d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = eng.below(m);
        } else {
            const double r = eng.uniform() * total;
            double acc = 0.0;
            pick = m - 1;
            for (std::size_t i = 0; i < m; ++i) {
                acc += min_d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(row_of(pick));
    }

    // global per-dimension variance as the starting scale
    std::vector<double> global_mean(d, 0.0), global_var(d, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < d; ++j) global_mean[j] += latents.at(i, j);
    for (double& v : global_mean) v /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = latents.at(i, j) - global_mean[j];
            global_var[j] += diff * diff;
        }
    for (double& v : global_var) v = std::max(v / static_cast<double>(m), var_floor);

    std::vector<std::vector<double>> means = centers;
    std::vector<std::vector<double>> vars(components, global_var);
    std::vector<double> weights(components, 1.0 / static_cast<double>(components));

    EmResult result;
    std::vector<double> resp(m * components);
    std::vector<double> lane(components);
    int retries = 0;
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        // E-step in log space
        double ll = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t c = 0; c < components; ++c) {
                double quad = 0.0, log_det = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = latents.at(i, j) - means[c][j];
                    quad += diff * diff / vars[c][j];
                    log_det += std::log(vars[c][j]);
                }
                lane[c] = std::log(std::max(weights[c], 1e-300)) -
                          0.5 * (quad + log_det + static_cast<double>(d) * kLog2Pi);
            }
            double mx = lane[0];
            for (std::size_t c = 1; c < components; ++c) mx = std::max(mx, lane[c]);
            double z = 0.0;
            for (std::size_t c = 0; c < components; ++c) z += std::exp(lane[c] - mx);
            const double lse = mx + std::log(z);
            ll += lse;
            for (std::size_t c = 0; c < components; ++c)
                resp[i * components + c] = std::exp(lane[c] - lse);
        }
        result.log_likelihood.push_back(ll);

        // M-step
        bool degenerate = false;
        for (std::size_t c = 0; c < components; ++c) {
            double nk = 0.0;
            for (std::size_t i = 0; i < m; ++i) nk += resp[i * components + c];
            if (nk < 1e-8) {
                degenerate = true;
                if (retries < opt.max_retries) {
                    // reseed at the point farthest from the current centers
                    std::size_t far = 0;
                    double far_d = -1.0;
                    for (std::size_t i = 0; i < m; ++i) {
                        double best = std::numeric_limits<double>::infinity();
                        for (const auto& mu : means) best = std::min(best, sq_dist(latents, i, mu));
                        if (best > far_d) {
                            far_d = best;
                            far = i;
                        }
                    }
                    means[c] = row_of(far);
                    vars[c] = global_var;
                    weights[c] = 1.0 / static_cast<double>(m);
                    ++retries;
                    continue;
                }
                nk = 1e-8;
            }
            weights[c] = nk / static_cast<double>(m);
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    acc += resp[i * components + c] * latents.at(i, j);
                means[c][j] = acc / nk;
            }
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double diff = latents.at(i, j) - means[c][j];
                    acc += resp[i * components + c] * diff * diff;
                }
                vars[c][j] = std::max(acc / nk, var_floor);
            }
        }
        // renormalize the weights (reseeding can perturb them)
        double wz = 0.0;
        for (double w : weights) wz += w;
        for (double& w : weights) w /= wz;

        if (!degenerate && iter > 0 && std::abs(ll - prev_ll) < opt.tol) break;
        prev_ll = ll;
    }

    MoGPrior prior = make_uniform_prior(components, d);
    for (std::size_t c = 0; c < components; ++c) {
        prior.logits.at(0, c) = std::log(std::max(weights[c], 1e-300));
        for (std::size_t j = 0; j < d; ++j) {
            prior.means.at(c, j) = means[c][j];
            prior.log_vars.at(c, j) = std::log(vars[c][j]);
        }
    }
    result.prior = std::move(prior);
    return result;
}

}  // namespace vdea::vae

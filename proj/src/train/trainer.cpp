#include "train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ad/adam.hpp"
#include "ad/tape.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "eval/metrics.hpp"
#include "ot/alignment.hpp"
#include "ot/gdot.hpp"
#include "vae/losses.hpp"

namespace vdea::train {

using ad::Tensor;
using ad::Var;
using data::Domain;
using data::PairedBatch;

double beta_schedule(int epoch, int anneal_epochs, double beta_max) {
    require(epoch >= 0, "beta_schedule: epoch must be nonnegative");
    if (anneal_epochs <= 0 || epoch >= anneal_epochs) return beta_max;
    return beta_max * static_cast<double>(epoch) / static_cast<double>(anneal_epochs);
}

TermGates loss_gates(Variant v, double lambda_vl, double lambda_vg) {
    TermGates g;
    g.local = v != Variant::base && lambda_vl != 0.0;
    g.global = (v == Variant::full || v == Variant::global) && lambda_vg != 0.0;
    return g;
}

double total_loss(double l_vr, double l_va, double l_vg, double lambda_vl, double lambda_vg,
                  Variant v) {
    const TermGates g = loss_gates(v, lambda_vl, lambda_vg);
    double total = l_vr;
    if (g.local) total += lambda_vl * l_va;
    if (g.global) total += lambda_vg * l_vg;
    return total;
}

namespace {

Tensor dense_rows(const std::vector<std::vector<std::uint32_t>>& rows, std::size_t item_count,
                  const std::vector<std::uint32_t>& users) {
    Tensor x(users.size(), item_count);
    for (std::size_t r = 0; r < users.size(); ++r)
        for (std::uint32_t i : rows[users[r]]) x.at(r, i) = 1.0;
    return x;
}

Tensor draw_noise(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    rng::Engine eng(seed);
    Tensor eps(rows, cols);
    for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = eng.normal();
    return eps;
}

struct DomainGraph {
    Var x;
    vae::EncodeResult enc;
    Var x_hat;
    Var gamma;
};

DomainGraph forward_domain(ad::Tape& tape, const vae::EncoderVars& enc,
                           const vae::DecoderVars& dec, const vae::MoGVars& prior, Tensor x,
                           Tensor eps) {
    DomainGraph g;
    g.x = tape.constant(std::move(x));
    g.enc = vae::encode_reparameterize(tape, enc, g.x, eps);
    g.x_hat = vae::decode(tape, dec, g.enc.z);
    g.gamma = vae::cluster_responsibilities(tape, g.enc.z, prior);
    return g;
}

}  // namespace

Tensor encode_all_users(const vae::EncoderParams& enc,
                        const std::vector<std::vector<std::uint32_t>>& train_rows,
                        std::size_t item_count) {
    Tensor out(train_rows.size(), enc.latent_dim());
    std::vector<double> row(item_count);
    for (std::size_t u = 0; u < train_rows.size(); ++u) {
        std::fill(row.begin(), row.end(), 0.0);
        for (std::uint32_t i : train_rows[u]) row[i] = 1.0;
        const std::vector<double> mu = vae::encode_mean(enc, row);
        for (std::size_t d = 0; d < mu.size(); ++d) out.at(u, d) = mu[d];
    }
    return out;
}

ModelParams pretrain_and_init(const RunConfig& cfg, const data::PocdrDataset& ds,
                              std::vector<double>* pretrain_trace) {
    validate(cfg);
    require(static_cast<std::size_t>(cfg.clusters) <= ds.source.user_count() &&
                static_cast<std::size_t>(cfg.clusters) <= ds.target.user_count(),
            "pretrain: clusters exceed the user count");

    ModelParams model = init_model(cfg, ds.source.item_count(), ds.target.item_count());
    ad::Adam adam(model.autoencoder_params(), {.lr = cfg.learning_rate});
    const auto n = static_cast<std::size_t>(cfg.batch_size);

    for (int epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
        const auto batches = make_batches(ds, n, rng::mix(cfg.noise_seed, 0x9e7eULL, epoch));
        double epoch_loss = 0.0;
        for (std::size_t bi = 0; bi < batches.size(); ++bi) {
            const PairedBatch& b = batches[bi];
            ad::Tape tape;
            auto enc_s = vae::bind(tape, model.source_encoder);
            auto dec_s = vae::bind(tape, model.source_decoder);
            auto enc_t = vae::bind(tape, model.target_encoder);
            auto dec_t = vae::bind(tape, model.target_decoder);
            Var xs = tape.constant(
                dense_rows(ds.source_train_rows, ds.source.item_count(), b.source_users));
            Var xt = tape.constant(
                dense_rows(ds.target_train_rows, ds.target.item_count(), b.target_users));
            auto zs = vae::encode_reparameterize(
                tape, enc_s, xs,
                draw_noise(n, cfg.latent_dim, rng::mix(cfg.noise_seed, 0xe5aULL, epoch, bi, 0)));
            auto zt = vae::encode_reparameterize(
                tape, enc_t, xt,
                draw_noise(n, cfg.latent_dim, rng::mix(cfg.noise_seed, 0xe5aULL, epoch, bi, 1)));
            Var loss = ad::add(vae::reconstruction_loss(tape, xs, vae::decode(tape, dec_s, zs.z)),
                               vae::reconstruction_loss(tape, xt, vae::decode(tape, dec_t, zt.z)));
            const double value = loss.item();
            if (!std::isfinite(value))
                throw NumericError("pretrain diverged at epoch " + std::to_string(epoch));
            epoch_loss += value;
            tape.backward(loss);
            adam.step();
        }
        if (pretrain_trace) pretrain_trace->push_back(epoch_loss / batches.size());
    }

    const Tensor src_latents =
        encode_all_users(model.source_encoder, ds.source_train_rows, ds.source.item_count());
    const Tensor tgt_latents =
        encode_all_users(model.target_encoder, ds.target_train_rows, ds.target.item_count());
    vae::EmOptions em;
    em.seed = rng::mix(cfg.model_seed, 0xe9ULL, 0);
    model.source_prior =
        vae::init_prior_from_latents(src_latents, cfg.clusters, em).prior;
    em.seed = rng::mix(cfg.model_seed, 0xe9ULL, 1);
    model.target_prior =
        vae::init_prior_from_latents(tgt_latents, cfg.clusters, em).prior;
    return model;
}

TrainResult train(const RunConfig& cfg, const data::PocdrDataset& ds,
                  const std::filesystem::path* psi_dump_dir) {
    ModelParams model = pretrain_and_init(cfg, ds);
    ad::Adam adam(model.all_params(), {.lr = cfg.learning_rate});
    const auto n = static_cast<std::size_t>(cfg.batch_size);
    const TermGates gates = loss_gates(cfg.variant, cfg.lambda_vl, cfg.lambda_vg);
    const eval::RankingProtocol protocol{cfg.top_k, cfg.negatives, cfg.eval_seed,
                                         cfg.full_catalog};

    TrainResult result;
    result.params = model;
    int stagnant = 0;

    for (int epoch = 0; epoch < cfg.train_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        EpochRecord rec;
        rec.epoch = epoch;
        rec.beta = beta_schedule(epoch, cfg.anneal_epochs, cfg.beta_max);

        Tensor psi;
        if (gates.global) {
            const ot::CostTensor cost = ot::build_cost_tensor(
                model.source_prior.means, model.source_prior.sigmas(), model.target_prior.means,
                model.target_prior.sigmas());
            ot::SinkhornOptions opt;
            opt.epsilon = cfg.epsilon;
            opt.outer_iterations = cfg.sinkhorn_outer;
            opt.inner_iterations = cfg.sinkhorn_inner;
            opt.marginal_tol = cfg.sinkhorn_tol;
            opt.jitter_seed = rng::mix(cfg.model_seed, 0x651ULL, epoch);
            const auto ws = model.source_prior.weights();
            const auto wt = model.target_prior.weights();
            psi = ot::gdot_sinkhorn(cost, ws, wt, opt).plan;
            if (psi_dump_dir) {
                char name[32];
                std::snprintf(name, sizeof(name), "psi_epoch_%04d.tsv", epoch);
                std::ofstream out(*psi_dump_dir / name, std::ios::binary);
                for (std::size_t i = 0; i < psi.rows(); ++i) {
                    for (std::size_t j = 0; j < psi.cols(); ++j)
                        out << (j ? "\t" : "") << psi.at(i, j);
                    out << '\n';
                }
            }
        }

        const auto batches = make_batches(ds, n, rng::mix(cfg.noise_seed, 0xba70ULL, epoch));
        for (std::size_t bi = 0; bi < batches.size(); ++bi) {
            const PairedBatch& b = batches[bi];
            ad::Tape tape;
            auto enc_s = vae::bind(tape, model.source_encoder);
            auto dec_s = vae::bind(tape, model.source_decoder);
            auto enc_t = vae::bind(tape, model.target_encoder);
            auto dec_t = vae::bind(tape, model.target_decoder);
            auto prior_s = vae::bind(tape, model.source_prior);
            auto prior_t = vae::bind(tape, model.target_prior);

            DomainGraph gs = forward_domain(
                tape, enc_s, dec_s, prior_s,
                dense_rows(ds.source_train_rows, ds.source.item_count(), b.source_users),
                draw_noise(n, cfg.latent_dim, rng::mix(cfg.noise_seed, 0xe50ULL, epoch, bi, 0)));
            DomainGraph gt = forward_domain(
                tape, enc_t, dec_t, prior_t,
                dense_rows(ds.target_train_rows, ds.target.item_count(), b.target_users),
                draw_noise(n, cfg.latent_dim, rng::mix(cfg.noise_seed, 0xe50ULL, epoch, bi, 1)));

            Var l_vr = vae::vr_loss(tape, {gs.x, gs.x_hat, gs.enc.gaussian, gs.gamma}, prior_s,
                                    {gt.x, gt.x_hat, gt.enc.gaussian, gt.gamma}, prior_t,
                                    rec.beta);
            Var loss = l_vr;
            double l_va_value = 0.0, l_vg_value = 0.0;
            if (gates.local) {
                Var l_va = ot::local_alignment_loss(tape, gs.enc.gaussian.mu,
                                                    gs.enc.gaussian.sigma, gt.enc.gaussian.mu,
                                                    gt.enc.gaussian.sigma, b.aligned);
                l_va_value = l_va.item();
                loss = ad::add(loss, ad::mul_scalar(l_va, cfg.lambda_vl));
            }
            if (gates.global) {
                Var l_vg = ot::global_alignment_loss(tape, prior_s.means, prior_s.sigmas,
                                                     prior_t.means, prior_t.sigmas, psi);
                l_vg_value = l_vg.item();
                loss = ad::add(loss, ad::mul_scalar(l_vg, cfg.lambda_vg));
            }

            const double l_vr_value = l_vr.item();
            const double total = loss.item();
            if (!std::isfinite(total))
                throw NumericError("training loss is not finite at epoch " +
                                   std::to_string(epoch) + " batch " + std::to_string(bi) +
                                   " (l_vr=" + std::to_string(l_vr_value) +
                                   ", l_va=" + std::to_string(l_va_value) +
                                   ", l_vg=" + std::to_string(l_vg_value) + ")");
            rec.l_vr += l_vr_value;
            rec.l_va += l_va_value;
            rec.l_vg += l_vg_value;
            rec.total += total;

            tape.backward(loss);
            adam.step();
        }
        const auto nb = static_cast<double>(batches.size());
        rec.l_vr /= nb;
        rec.l_va /= nb;
        rec.l_vg /= nb;
        rec.total /= nb;

        const eval::MetricsReport metrics = eval::evaluate_topk(model, ds, eval::Split::val,
                                                                protocol);
        rec.hr5_src = metrics.source.hr;
        rec.ndcg5_src = metrics.source.ndcg;
        rec.hr5_tgt = metrics.target.hr;
        rec.ndcg5_tgt = metrics.target.ndcg;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back(rec);

        const double score = 0.5 * (rec.hr5_src + rec.hr5_tgt);
        if (result.best_epoch < 0 || score > result.best_score) {
            result.best_score = score;
            result.best_epoch = epoch;
            result.params = model;
            stagnant = 0;
        } else if (++stagnant >= cfg.patience && cfg.patience > 0) {
            break;
        }
    }
    if (result.best_epoch < 0) result.params = model;  // train_epochs == 0
    return result;
}

void write_train_log_csv(const std::filesystem::path& path,
                         const std::vector<EpochRecord>& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "epoch,l_vr,l_va,l_vg,total,beta,hr5_src,ndcg5_src,hr5_tgt,ndcg5_tgt,seconds\n";
    char line[512];
    for (const auto& r : log) {
        std::snprintf(line, sizeof(line),
                      "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f\n", r.epoch,
                      r.l_vr, r.l_va, r.l_vg, r.total, r.beta, r.hr5_src, r.ndcg5_src, r.hr5_tgt,
                      r.ndcg5_tgt, r.seconds);
        out << line;
    }
}

}  // namespace vdea::train

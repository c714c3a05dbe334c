#include "ot/gdot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "ot/wasserstein.hpp"

namespace vdea::ot {

namespace {

void check_simplex(std::span<const double> pi, const char* name) {
    double total = 0.0;
    for (double p : pi) {
        require(p >= 0.0, std::string(name) + ": negative marginal entry");
        total += p;
    }
    require(std::abs(total - 1.0) <= 1e-6, std::string(name) + ": marginals must sum to 1");
}

double log_sum_exp(std::span<const double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;  // all -inf
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - m);
    return m + std::log(acc);
}

double marginal_violation(const ad::Tensor& psi, std::span<const double> piS,
                          std::span<const double> piT) {
    const std::size_t k = psi.rows();
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < k; ++j) r += psi.at(i, j);
        worst = std::max(worst, std::abs(r - piS[i]));
    }
    for (std::size_t j = 0; j < k; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < k; ++i) c += psi.at(i, j);
        worst = std::max(worst, std::abs(c - piT[j]));
    }
    return worst;
}

}  // namespace

CostTensor::CostTensor(ad::Tensor source_distances, ad::Tensor target_distances)
    : ds_(std::move(source_distances)), dt_(std::move(target_distances)) {
    require(ds_.rows() == ds_.cols() && dt_.rows() == dt_.cols() && ds_.rows() == dt_.rows(),
            "cost tensor: distance matrices must be square with equal K");
    for (std::size_t i = 0; i < ds_.rows(); ++i) {
        require(ds_.at(i, i) == 0.0 && dt_.at(i, i) == 0.0,
                "cost tensor: distance matrices need zero diagonals");
        for (std::size_t j = 0; j < ds_.cols(); ++j) {
            require(ds_.at(i, j) >= 0.0 && dt_.at(i, j) >= 0.0,
                    "cost tensor: distances must be nonnegative");
            require(ds_.at(i, j) == ds_.at(j, i) && dt_.at(i, j) == dt_.at(j, i),
                    "cost tensor: distance matrices must be symmetric");
        }
    }
}

double CostTensor::entry(std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) const {
    const double d = ds_.at(i, i2) - dt_.at(j, j2);
    return d * d;
}

ad::Tensor CostTensor::contract(const ad::Tensor& psi) const {
    const std::size_t k = this->k();
    require(psi.rows() == k && psi.cols() == k, "contract: psi shape mismatch");
    std::vector<double> r(k, 0.0), c(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            r[i] += psi.at(i, j);
            c[j] += psi.at(i, j);
        }
    std::vector<double> ds2r(k, 0.0), dt2c(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            ds2r[i] += ds_.at(i, j) * ds_.at(i, j) * r[j];
            dt2c[i] += dt_.at(i, j) * dt_.at(i, j) * c[j];
        }
    // cross = dS psi dT^T
    ad::Tensor tmp(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t m = 0; m < k; ++m) {
            const double ds_im = ds_.at(i, m);
            if (ds_im == 0.0) continue;
            for (std::size_t j = 0; j < k; ++j) tmp.at(i, j) += ds_im * psi.at(m, j);
        }
    ad::Tensor out(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double cross = 0.0;
            for (std::size_t m = 0; m < k; ++m) cross += tmp.at(i, m) * dt_.at(j, m);
            out.at(i, j) = ds2r[i] + dt2c[j] - 2.0 * cross;
        }
    return out;
}

ad::Tensor CostTensor::contract_dense(const ad::Tensor& psi) const {
    const std::size_t k = this->k();
    require(psi.rows() == k && psi.cols() == k, "contract_dense: psi shape mismatch");
    ad::Tensor out(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double acc = 0.0;
            for (std::size_t i2 = 0; i2 < k; ++i2)
                for (std::size_t j2 = 0; j2 < k; ++j2)
                    acc += entry(i, j, i2, j2) * psi.at(i2, j2);
            out.at(i, j) = acc;
        }
    return out;
}

CostTensor build_cost_tensor(const ad::Tensor& source_means, const ad::Tensor& source_sigmas,
                             const ad::Tensor& target_means, const ad::Tensor& target_sigmas) {
    return CostTensor(component_distance_matrix(source_means, source_sigmas),
                      component_distance_matrix(target_means, target_sigmas));
}

double CouplingMatrix::max_marginal_violation() const {
    return marginal_violation(plan, source_marginal, target_marginal);
}

CouplingMatrix gdot_sinkhorn(const CostTensor& cost, std::span<const double> source_marginal,
                             std::span<const double> target_marginal,
                             const SinkhornOptions& opt) {
    const std::size_t k = cost.k();
    require(source_marginal.size() == k && target_marginal.size() == k,
            "gdot_sinkhorn: marginal length mismatch");
    require(opt.epsilon > 0.0, "gdot_sinkhorn: epsilon must be positive");
    check_simplex(source_marginal, "gdot_sinkhorn source");
    check_simplex(target_marginal, "gdot_sinkhorn target");

    // psi0: jittered product measure, rows rescaled back to the source
    // marginal. The exact product measure is a fixed point for mirrored
    // geometries, so the jitter is what lets the outer loop move.
    rng::Engine eng(rng::mix(opt.jitter_seed, 0x6f74a11bULL));
    ad::Tensor psi(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            psi.at(i, j) = source_marginal[i] * target_marginal[j] * eng.uniform(0.99, 1.01);
            row += psi.at(i, j);
        }
        if (row > 0.0)
            for (std::size_t j = 0; j < k; ++j) psi.at(i, j) *= source_marginal[i] / row;
    }

    std::vector<double> log_pi_s(k), log_pi_t(k);
    for (std::size_t i = 0; i < k; ++i) {
        log_pi_s[i] = std::log(std::max(source_marginal[i], 1e-300));
        log_pi_t[i] = std::log(std::max(target_marginal[i], 1e-300));
    }

    std::vector<double> log_u(k, 0.0), log_v(k, 0.0), lane(k);
    ad::Tensor cur(k, k);
    for (int outer = 0; outer < opt.outer_iterations; ++outer) {
        const ad::Tensor g = cost.contract(psi);
        ad::Tensor log_h(k, k);
        for (std::size_t i = 0; i < k * k; ++i) log_h[i] = -g[i] / opt.epsilon;

        std::fill(log_u.begin(), log_u.end(), 0.0);
        std::fill(log_v.begin(), log_v.end(), 0.0);
        for (int inner = 0; inner < opt.inner_iterations; ++inner) {
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) lane[j] = log_h.at(i, j) + log_v[j];
                log_u[i] = log_pi_s[i] - log_sum_exp(lane);
            }
            for (std::size_t j = 0; j < k; ++j) {
                for (std::size_t i = 0; i < k; ++i) lane[i] = log_h.at(i, j) + log_u[i];
                log_v[j] = log_pi_t[j] - log_sum_exp(lane);
            }
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j)
                    cur.at(i, j) = std::exp(log_u[i] + log_h.at(i, j) + log_v[j]);
            const double viol = marginal_violation(cur, source_marginal, target_marginal);
            if (opt.violation_trace) opt.violation_trace->push_back(viol);
            if (viol <= opt.marginal_tol) break;
        }

        double delta = 0.0;
        for (std::size_t i = 0; i < k * k; ++i) delta = std::max(delta, std::abs(cur[i] - psi[i]));
        psi = cur;
        if (delta <= opt.outer_tol) break;
    }

    CouplingMatrix out;
    out.plan = std::move(psi);
    out.source_marginal.assign(source_marginal.begin(), source_marginal.end());
    out.target_marginal.assign(target_marginal.begin(), target_marginal.end());
    return out;
}

double gw_objective(const ad::Tensor& psi, const CostTensor& cost) {
    const ad::Tensor g = cost.contract(psi);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * psi[i];
    return acc;
}

}  // namespace vdea::ot

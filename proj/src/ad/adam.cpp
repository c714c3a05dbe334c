#include "ad/adam.hpp"

#include <cmath>

#include "common/error.hpp"

namespace vdea::ad {

Adam::Adam(std::vector<Tensor*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
    require(cfg_.lr > 0 && cfg_.eps > 0, "adam: lr and eps must be positive");
    require(cfg_.beta1 >= 0 && cfg_.beta1 < 1 && cfg_.beta2 >= 0 && cfg_.beta2 < 1,
            "adam: betas must lie in [0, 1)");
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Tensor* p : params_) {
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        Tensor& p = *params_[pi];
        require(p.grad.has_value() && p.grad->size() == p.size(),
                "adam: missing gradient for a parameter");
        auto& g = *p.grad;
        auto& m = m_[pi];
        auto& v = v_[pi];
        for (std::size_t i = 0; i < g.size(); ++i) {
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

void Adam::zero_grad() {
    for (Tensor* p : params_) p->grad.reset();
}

}  // namespace vdea::ad

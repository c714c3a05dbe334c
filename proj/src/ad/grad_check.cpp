#include "ad/grad_check.hpp"

#include <cmath>

#include "common/error.hpp"

namespace vdea::ad {

namespace {

double eval_loss(const std::vector<Tensor*>& params, const LossBuilder& loss) {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(params.size());
    for (Tensor* p : params) vars.push_back(tape.param(*p));
    return loss(tape, vars).item();
}

}  // namespace

double grad_check(const std::vector<Tensor*>& params, const LossBuilder& loss, double h) {
    require(h > 0, "grad_check: step must be positive");
    for (Tensor* p : params) p->requires_grad = true;

    // analytic pass
    {
        Tape tape;
        std::vector<Var> vars;
        vars.reserve(params.size());
        for (Tensor* p : params) vars.push_back(tape.param(*p));
        tape.backward(loss(tape, vars));
    }
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (Tensor* p : params) analytic.push_back(*p->grad);

    double max_rel = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& p = *params[pi];
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double saved = p[i];
            p[i] = saved + h;
            const double fp = eval_loss(params, loss);
            p[i] = saved - h;
            const double fm = eval_loss(params, loss);
            p[i] = saved;
            const double fd = (fp - fm) / (2.0 * h);
            const double a = analytic[pi][i];
            const double rel = std::abs(a - fd) / std::max(1.0, std::abs(a));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace vdea::ad

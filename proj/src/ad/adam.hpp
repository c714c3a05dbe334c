#pragma once

#include <cstdint>
#include <vector>

#include "ad/tensor.hpp"

namespace vdea::ad {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam over a fixed set of externally owned parameter tensors.
class Adam {
public:
    explicit Adam(std::vector<Tensor*> params, AdamConfig cfg = {});

    // Applies one update using each parameter's .grad; the step counter is
    // incremented first so bias correction uses t >= 1.
    void step();
    void zero_grad();

    std::int64_t steps() const { return t_; }
    const std::vector<double>& first_moment(std::size_t i) const { return m_[i]; }
    const std::vector<double>& second_moment(std::size_t i) const { return v_[i]; }

private:
    std::vector<Tensor*> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    AdamConfig cfg_;
    std::int64_t t_ = 0;
};

}  // namespace vdea::ad

#pragma once

#include <cstdint>

#include "ad/tensor.hpp"

namespace vdea::eval {

struct DiscrepancyReport {
    double d_a = 0.0;         // 2 (1 - 2 * test error), in [-2, 2]
    double train_error = 0.0;
    double test_error = 0.0;
    std::size_t n_source = 0;
    std::size_t n_target = 0;
};

// Proxy A-distance: label the two embedding sets 0/1, train a logistic linear
// classifier on a stratified 50/50 split (500 full-batch gradient steps,
// lr 0.1, L2 1e-4), and read the held-out error.
DiscrepancyReport proxy_a_distance(const ad::Tensor& source_embeddings,
                                   const ad::Tensor& target_embeddings, std::uint64_t seed);

}  // namespace vdea::eval

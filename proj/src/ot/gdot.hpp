#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ad/tensor.hpp"

namespace vdea::ot {

// Gromov-Wasserstein cost M[i][j][i'][j'] = (dS[i][i'] - dT[j][j'])^2 over
// cluster pairs. Stored as the two within-domain distance matrices; the K^4
// tensor is only materialized on demand (tests, small K).
class CostTensor {
public:
    CostTensor(ad::Tensor source_distances, ad::Tensor target_distances);

    std::size_t k() const { return ds_.rows(); }
    const ad::Tensor& source_distances() const { return ds_; }
    const ad::Tensor& target_distances() const { return dt_; }

    double entry(std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) const;

    // [M (x) psi]_{ij} = sum_{i'j'} M[i][j][i'][j'] psi_{i'j'} via
    //   (dS o dS) r 1^T + 1 ((dT o dT) c)^T - 2 dS psi dT^T,
    // with r, c the row/column sums of psi. O(K^3).
    ad::Tensor contract(const ad::Tensor& psi) const;

    // Reference O(K^4) contraction over the materialized entries.
    ad::Tensor contract_dense(const ad::Tensor& psi) const;

private:
    ad::Tensor ds_;
    ad::Tensor dt_;
};

// Distance matrices from the two mixture priors' component parameters
// (means K x D, sigmas K x D, per domain).
CostTensor build_cost_tensor(const ad::Tensor& source_means, const ad::Tensor& source_sigmas,
                             const ad::Tensor& target_means, const ad::Tensor& target_sigmas);

struct SinkhornOptions {
    double epsilon = 0.1;
    int outer_iterations = 10;
    int inner_iterations = 50;
    double marginal_tol = 1e-6;
    double outer_tol = 1e-7;
    std::uint64_t jitter_seed = 0;
    // When set, receives the marginal violation after every inner iteration.
    std::vector<double>* violation_trace = nullptr;
};

struct CouplingMatrix {
    ad::Tensor plan;  // K x K, nonnegative
    std::vector<double> source_marginal;
    std::vector<double> target_marginal;

    double max_marginal_violation() const;
};

// Alternating scheme: recompute the linearized kernel H = exp(-(M (x) psi)/eps)
// and rescale it to the prescribed marginals with Sinkhorn updates
// u <- piS / (H v), v <- piT / (H^T u). The kernel and scalings are kept in
// log space, so extreme cost/epsilon ratios cannot underflow the iteration.
CouplingMatrix gdot_sinkhorn(const CostTensor& cost, std::span<const double> source_marginal,
                             std::span<const double> target_marginal,
                             const SinkhornOptions& opt);

// Quadratic transport cost <M (x) psi, psi> (no entropy term).
double gw_objective(const ad::Tensor& psi, const CostTensor& cost);

}  // namespace vdea::ot

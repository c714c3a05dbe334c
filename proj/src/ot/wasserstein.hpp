#pragma once

#include <span>

#include "ad/tensor.hpp"

namespace vdea::ot {

// Squared 2-Wasserstein distance between axis-aligned Gaussians:
// ||mu1 - mu2||^2 + ||sigma1 - sigma2||^2, with sigma the standard
// deviations. Symmetric, zero iff the Gaussians coincide.
double gaussian_w2(std::span<const double> mu1, std::span<const double> sigma1,
                   std::span<const double> mu2, std::span<const double> sigma2);

// K x K gaussian_w2 between all row pairs of (means, sigmas).
ad::Tensor component_distance_matrix(const ad::Tensor& means, const ad::Tensor& sigmas);

}  // namespace vdea::ot

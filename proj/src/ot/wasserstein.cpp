#include "ot/wasserstein.hpp"

#include "common/error.hpp"

namespace vdea::ot {

double gaussian_w2(std::span<const double> mu1, std::span<const double> sigma1,
                   std::span<const double> mu2, std::span<const double> sigma2) {
    require(mu1.size() == mu2.size() && sigma1.size() == sigma2.size() &&
                mu1.size() == sigma1.size(),
            "gaussian_w2: dimension mismatch");
    double acc = 0.0;
    for (std::size_t d = 0; d < mu1.size(); ++d) {
        require(sigma1[d] > 0.0 && sigma2[d] > 0.0, "gaussian_w2: sigma must be positive");
        const double dm = mu1[d] - mu2[d];
        const double ds = sigma1[d] - sigma2[d];
        acc += dm * dm + ds * ds;
    }
    return acc;
}

ad::Tensor component_distance_matrix(const ad::Tensor& means, const ad::Tensor& sigmas) {
    require(means.rows() == sigmas.rows() && means.cols() == sigmas.cols(),
            "component_distance_matrix: shape mismatch");
    const std::size_t k = means.rows();
    const std::size_t d = means.cols();
    ad::Tensor out(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double w = gaussian_w2({means.data() + i * d, d}, {sigmas.data() + i * d, d},
                                         {means.data() + j * d, d}, {sigmas.data() + j * d, d});
            out.at(i, j) = w;
            out.at(j, i) = w;
        }
    }
    return out;
}

}  // namespace vdea::ot

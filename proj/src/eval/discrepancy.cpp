#include "eval/discrepancy.hpp"

#include <cmath>
#include <vector>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace vdea::eval {

namespace {

constexpr int kSteps = 500;
constexpr double kLr = 0.1;
constexpr double kL2 = 1e-4;

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

DiscrepancyReport proxy_a_distance(const ad::Tensor& source_embeddings,
                                   const ad::Tensor& target_embeddings, std::uint64_t seed) {
    const std::size_t ns = source_embeddings.rows();
    const std::size_t nt = target_embeddings.rows();
    const std::size_t d = source_embeddings.cols();
    require(target_embeddings.cols() == d, "proxy_a_distance: dimension mismatch");
    if (ns < 10 || nt < 10)
        throw DataError("proxy_a_distance: need at least 10 samples per side");

    // stratified 50/50 split
    rng::Engine eng(rng::mix(seed, 0xdaULL));
    auto halves = [&](std::size_t n) {
        std::vector<std::uint32_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
        eng.shuffle(idx);
        const std::size_t cut = n / 2;
        return std::make_pair(std::vector<std::uint32_t>(idx.begin(), idx.begin() + cut),
                              std::vector<std::uint32_t>(idx.begin() + cut, idx.end()));
    };
    const auto [src_train, src_test] = halves(ns);
    const auto [tgt_train, tgt_test] = halves(nt);

    struct Sample {
        const double* x;
        double y;
    };
    std::vector<Sample> train, test;
    for (auto i : src_train) train.push_back({source_embeddings.data() + i * d, 0.0});
    for (auto i : tgt_train) train.push_back({target_embeddings.data() + i * d, 1.0});
    for (auto i : src_test) test.push_back({source_embeddings.data() + i * d, 0.0});
    for (auto i : tgt_test) test.push_back({target_embeddings.data() + i * d, 1.0});

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> gw(d);
    const double inv_n = 1.0 / static_cast<double>(train.size());
    for (int step = 0; step < kSteps; ++step) {
        std::fill(gw.begin(), gw.end(), 0.0);
        double gb = 0.0;
        for (const Sample& s : train) {
            double z = b;
            for (std::size_t j = 0; j < d; ++j) z += w[j] * s.x[j];
            const double err = stable_sigmoid(z) - s.y;
            for (std::size_t j = 0; j < d; ++j) gw[j] += err * s.x[j];
            gb += err;
        }
        for (std::size_t j = 0; j < d; ++j) w[j] -= kLr * (gw[j] * inv_n + kL2 * w[j]);
        b -= kLr * gb * inv_n;
    }

    auto error_on = [&](const std::vector<Sample>& set) {
        std::size_t wrong = 0;
        for (const Sample& s : set) {
            double z = b;
            for (std::size_t j = 0; j < d; ++j) z += w[j] * s.x[j];
            const double pred = z >= 0.0 ? 1.0 : 0.0;
            if (pred != s.y) ++wrong;
        }
        return static_cast<double>(wrong) / static_cast<double>(set.size());
    };

    DiscrepancyReport report;
    report.n_source = ns;
    report.n_target = nt;
    report.train_error = error_on(train);
    report.test_error = error_on(test);
    report.d_a = 2.0 * (1.0 - 2.0 * report.test_error);
    return report;
}

}  // namespace vdea::eval

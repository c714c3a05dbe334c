#pragma once

#include <cstdint>
#include <filesystem>

#include "data/dataset.hpp"
#include "train/model.hpp"

namespace vdea::eval {

enum class Split { val, test };

struct RankingProtocol {
    int k = 5;
    int negatives = 99;       // sampled unobserved items per positive
    std::uint64_t seed = 0;   // negative-sampling seed
    bool full_catalog = false;  // rank against every unobserved item instead
};

struct DomainMetrics {
    double hr = 0.0;
    double ndcg = 0.0;
    std::size_t pairs = 0;    // evaluated (user, item) pairs
    std::size_t skipped = 0;  // pairs with no candidates
};

struct MetricsReport {
    DomainMetrics source, target;
    RankingProtocol protocol;
};

// Scores each held-out positive against sampled negatives using the decoder
// probabilities at the posterior mean of the user's training row. Negatives
// are drawn per (user, item) so the result does not depend on pair order;
// ties break by ascending item index.
MetricsReport evaluate_topk(const train::ModelParams& params, const data::PocdrDataset& ds,
                            Split split, const RankingProtocol& protocol);

// CSV: split,domain,k,hr,ndcg,pairs
void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& report,
                       Split split);

// Per-pair hit/gain given the 1-based rank of the positive.
inline double hr_contribution(std::size_t rank, int k) { return rank <= static_cast<std::size_t>(k) ? 1.0 : 0.0; }
double ndcg_contribution(std::size_t rank, int k);

}  // namespace vdea::eval

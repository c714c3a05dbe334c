#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace vdea::eval {

using data::Domain;

double ndcg_contribution(std::size_t rank, int k) {
    if (rank > static_cast<std::size_t>(k)) return 0.0;
    return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

namespace {

std::vector<double> user_scores(const vae::EncoderParams& enc, const vae::DecoderParams& dec,
                                const std::vector<std::uint32_t>& train_items,
                                std::size_t item_count) {
    std::vector<double> row(item_count, 0.0);
    for (std::uint32_t i : train_items) row[i] = 1.0;
    const std::vector<double> z = vae::encode_mean(enc, row);
    return vae::decode_probs(dec, z);
}

// 1-based rank of the positive among the candidates; ties resolved by
// ascending item index.
std::size_t rank_of_positive(const std::vector<double>& scores, std::uint32_t positive,
                             const std::vector<std::uint32_t>& negatives) {
    const double pos_score = scores[positive];
    std::size_t rank = 1;
    for (std::uint32_t c : negatives) {
        const double s = scores[c];
        if (s > pos_score || (s == pos_score && c < positive)) ++rank;
    }
    return rank;
}

DomainMetrics evaluate_domain(const vae::EncoderParams& enc, const vae::DecoderParams& dec,
                              const data::InteractionMatrix& matrix,
                              const std::vector<std::vector<std::uint32_t>>& train_rows,
                              const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                              const RankingProtocol& protocol, std::uint64_t domain_tag) {
    DomainMetrics m;
    const std::size_t items = matrix.item_count();
    double hr_sum = 0.0, ndcg_sum = 0.0;
    std::vector<double> scores;
    std::uint32_t cached_user = UINT32_MAX;
    // pairs are sorted (user, item); scoring is cached per user and
    // accumulation runs in this canonical order regardless of input order.
    for (const auto& [user, positive] : pairs) {
        if (user != cached_user) {
            scores = user_scores(enc, dec, train_rows[user], items);
            cached_user = user;
        }
        const auto& exclusion = matrix.rows[user];  // all of the user's positives
        std::vector<std::uint32_t> negatives;
        if (protocol.full_catalog) {
            negatives.reserve(items - exclusion.size());
            for (std::uint32_t i = 0; i < items; ++i)
                if (!std::binary_search(exclusion.begin(), exclusion.end(), i))
                    negatives.push_back(i);
        } else {
            const std::size_t available = items - exclusion.size();
            if (available == 0) {
                ++m.skipped;
                continue;
            }
            const auto want = std::min<std::size_t>(protocol.negatives, available);
            rng::Engine eng(rng::mix(protocol.seed, domain_tag, user, positive));
            if (want == available) {
                for (std::uint32_t i = 0; i < items; ++i)
                    if (!std::binary_search(exclusion.begin(), exclusion.end(), i))
                        negatives.push_back(i);
            } else {
                std::unordered_set<std::uint32_t> chosen;
                negatives.reserve(want);
                while (negatives.size() < want) {
                    const auto cand = static_cast<std::uint32_t>(eng.below(items));
                    if (std::binary_search(exclusion.begin(), exclusion.end(), cand)) continue;
                    if (!chosen.insert(cand).second) continue;
                    negatives.push_back(cand);
                }
            }
        }
        if (negatives.empty()) {
            ++m.skipped;
            continue;
        }
        const std::size_t rank = rank_of_positive(scores, positive, negatives);
        hr_sum += hr_contribution(rank, protocol.k);
        ndcg_sum += ndcg_contribution(rank, protocol.k);
        ++m.pairs;
    }
    if (m.pairs > 0) {
        m.hr = hr_sum / static_cast<double>(m.pairs);
        m.ndcg = ndcg_sum / static_cast<double>(m.pairs);
    }
    return m;
}

}  // namespace

MetricsReport evaluate_topk(const train::ModelParams& params, const data::PocdrDataset& ds,
                            Split split, const RankingProtocol& protocol) {
    require(protocol.k >= 1, "evaluate_topk: k must be at least 1");
    require(protocol.full_catalog || protocol.negatives >= protocol.k,
            "evaluate_topk: negatives must be at least k");
    require(params.source_encoder.input_dim() == ds.source.item_count() &&
                params.target_encoder.input_dim() == ds.target.item_count(),
            "evaluate_topk: model and dataset dimensions disagree");
    const bool test = split == Split::test;
    MetricsReport report;
    report.protocol = protocol;
    report.source = evaluate_domain(params.source_encoder, params.source_decoder, ds.source,
                                    ds.source_train_rows, ds.eval_pairs(Domain::source, test),
                                    protocol, 0);
    report.target = evaluate_domain(params.target_encoder, params.target_decoder, ds.target,
                                    ds.target_train_rows, ds.eval_pairs(Domain::target, test),
                                    protocol, 1);
    return report;
}

void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& report,
                       Split split) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    const char* split_name = split == Split::test ? "test" : "val";
    char line[256];
    out << "split,domain,k,hr,ndcg,pairs\n";
    std::snprintf(line, sizeof(line), "%s,source,%d,%.17g,%.17g,%zu\n", split_name,
                  report.protocol.k, report.source.hr, report.source.ndcg, report.source.pairs);
    out << line;
    std::snprintf(line, sizeof(line), "%s,target,%d,%.17g,%.17g,%zu\n", split_name,
                  report.protocol.k, report.target.hr, report.target.ndcg, report.target.pairs);
    out << line;
}

}  // namespace vdea::eval

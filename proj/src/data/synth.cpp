#include "data/synth.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace vdea::data {

namespace {

// 85th percentile of the standard normal: ~15% positive rate at noise 0.
constexpr double kAffinityThreshold = 1.0364333894937898;

InteractionMatrix make_domain(const std::vector<int>& labels, int items, double noise,
                              const std::string& item_prefix, rng::Engine& eng,
                              bool& has_empty_row) {
    const int users = static_cast<int>(labels.size());
    const int protos = 1 + *std::max_element(labels.begin(), labels.end());
    std::vector<double> affinity(static_cast<std::size_t>(items) * protos);
    for (double& a : affinity) a = eng.normal();

    InteractionMatrix m;
    m.user_ids.reserve(users);
    for (int u = 0; u < users; ++u) m.user_ids.push_back("u" + std::to_string(u));
    m.item_ids.reserve(items);
    for (int i = 0; i < items; ++i) m.item_ids.push_back(item_prefix + std::to_string(i));
    m.rows.assign(users, {});
    has_empty_row = false;
    for (int u = 0; u < users; ++u) {
        for (int i = 0; i < items; ++i) {
            const double a = affinity[static_cast<std::size_t>(i) * protos + labels[u]];
            const double perturbed = a + noise * eng.normal();
            if (perturbed >= kAffinityThreshold)
                m.rows[u].push_back(static_cast<std::uint32_t>(i));
        }
        if (m.rows[u].empty()) has_empty_row = true;
    }
    return m;
}

}  // namespace

PocdrDataset generate_synthetic(const SynthConfig& cfg) {
    require(cfg.prototype_count >= 2, "synth: need at least 2 prototypes");
    require(cfg.users > 0 && cfg.items > 0, "synth: counts must be positive");
    require(cfg.noise >= 0.0, "synth: noise must be nonnegative");

    for (int attempt = 0; attempt < 10; ++attempt) {
        rng::Engine eng(rng::mix(cfg.seed, 0x5b17ULL, static_cast<std::uint64_t>(attempt)));
        std::vector<int> labels(cfg.users);
        for (int& l : labels) l = static_cast<int>(eng.below(cfg.prototype_count));

        bool src_empty = false, tgt_empty = false;
        InteractionMatrix source =
            make_domain(labels, cfg.items, cfg.noise, "s_i", eng, src_empty);
        InteractionMatrix target =
            make_domain(labels, cfg.items, cfg.noise, "t_i", eng, tgt_empty);
        if (src_empty || tgt_empty) continue;

        PocdrDataset ds = build_pocdr_dataset(std::move(source), std::move(target), cfg.ku,
                                              cfg.seed);
        ds.source_labels = labels;
        ds.target_labels = std::move(labels);
        ds.finalize();
        return ds;
    }
    throw DataError("synth: gave up after 10 attempts; parameters produce empty user rows");
}

}  // namespace vdea::data

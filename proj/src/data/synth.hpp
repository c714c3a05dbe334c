#pragma once

#include <cstdint>

#include "data/dataset.hpp"

namespace vdea::data {

struct SynthConfig {
    int prototype_count = 4;  // latent user groups
    int users = 600;          // shared identity pool; present in both domains
    int items = 200;          // per domain
    double ku = 0.3;
    double noise = 0.5;       // scale of the per-entry Gaussian perturbation
    std::uint64_t seed = 0;
};

// Draws one prototype per user (shared across domains), one affinity per
// (domain, item, prototype), and sets an entry positive when the affinity
// plus noise clears the threshold. At noise 0 rows are a pure function of the
// prototype. Regenerates with a shifted stream on empty user rows, failing
// after 10 attempts.
PocdrDataset generate_synthetic(const SynthConfig& cfg);

}  // namespace vdea::data

#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "data/interactions.hpp"

namespace vdea::data {

enum class Domain { source, target };

// Partial one-to-one correspondence between source and target user indices.
struct OverlapMap {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // sorted by source index
    double declared_ratio = 0.0;

    bool source_overlapped(std::uint32_t u) const;
    bool target_overlapped(std::uint32_t u) const;
};

// Positions into the canonical positive enumeration (user-major, item
// ascending) of one domain.
struct SplitSets {
    std::vector<std::uint32_t> train, val, test;
};

struct PocdrDataset {
    InteractionMatrix source, target;
    OverlapMap overlap;
    SplitSets source_split, target_split;
    std::vector<int> source_labels, target_labels;  // synthetic ground truth; may be empty
    double ku = 0.0;
    std::uint64_t seed = 0;

    // Derived by finalize(): canonical positive lists, per-user train rows,
    // and the (user, item) pairs of each evaluation split.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> source_positives, target_positives;
    std::vector<std::vector<std::uint32_t>> source_train_rows, target_train_rows;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> source_val_pairs, source_test_pairs;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> target_val_pairs, target_test_pairs;

    const InteractionMatrix& matrix(Domain d) const {
        return d == Domain::source ? source : target;
    }
    const SplitSets& split(Domain d) const {
        return d == Domain::source ? source_split : target_split;
    }
    const std::vector<std::vector<std::uint32_t>>& train_rows(Domain d) const {
        return d == Domain::source ? source_train_rows : target_train_rows;
    }
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& eval_pairs(Domain d,
                                                                           bool test) const;
    bool has_labels() const { return !source_labels.empty(); }

    // Rebuilds the derived structures and validates the invariants
    // (split partition, overlap injectivity, label sizes).
    void finalize();
};

// Samples round(ku * |shared id pool|) shared users as overlapped and splits
// each domain's positives 8:1:1 by uniform shuffling with the given seed.
// Users present in both matrices (by id) form the shared pool; unsampled
// shared users stay in both domains as unlinked rows.
PocdrDataset build_pocdr_dataset(InteractionMatrix source, InteractionMatrix target, double ku,
                                 std::uint64_t seed);

// One training batch: row i of the source block pairs with row i of the
// target block iff aligned[i].
struct PairedBatch {
    std::vector<std::uint32_t> source_users, target_users;
    std::vector<std::uint8_t> aligned;
};

// Shuffled epoch coverage: every user of both domains appears at least once;
// overlapped users are placed at identical row offsets of both blocks.
std::vector<PairedBatch> make_batches(const PocdrDataset& ds, std::size_t batch_size,
                                      std::uint64_t epoch_seed);

// --- artifact I/O ---

// Flat binary: magic "PODS", u32 version, u64 rows, u64 cols, u64 nnz, then
// nnz little-endian (u32 row, u32 col) pairs in canonical order.
void write_npzlike(const std::filesystem::path& path, const InteractionMatrix& m);
InteractionMatrix read_npzlike(const std::filesystem::path& path,
                               const std::vector<std::string>& user_ids,
                               const std::vector<std::string>& item_ids);

// Ingested domain pair (pre-overlap): meta.json, npzlike matrices, id maps.
void write_domains(const std::filesystem::path& dir, const InteractionMatrix& source,
                   const InteractionMatrix& target);
std::pair<InteractionMatrix, InteractionMatrix> read_domains(const std::filesystem::path& dir);

// Full dataset artifact: meta.json, npzlike matrices, id maps, overlap.tsv,
// splits.json, labels.tsv when ground-truth labels exist.
void write_dataset(const std::filesystem::path& dir, const PocdrDataset& ds);
PocdrDataset read_dataset(const std::filesystem::path& dir);

}  // namespace vdea::data

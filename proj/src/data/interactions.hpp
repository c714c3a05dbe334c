#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace vdea::data {

struct RatingRecord {
    std::string user;
    std::string item;
    double rating = 0.0;
};

// Binary implicit-feedback matrix with dense index maps. Row item lists are
// kept sorted ascending.
struct InteractionMatrix {
    std::vector<std::string> user_ids;  // index -> original id
    std::vector<std::string> item_ids;
    std::vector<std::vector<std::uint32_t>> rows;  // per user, sorted item indices

    std::size_t user_count() const { return user_ids.size(); }
    std::size_t item_count() const { return item_ids.size(); }
    std::size_t nnz() const;
    bool has(std::uint32_t user, std::uint32_t item) const;
};

// Parses the `user_id,item_id,rating` CSV contract. Throws DataError with a
// line number on malformed rows.
std::vector<RatingRecord> read_rating_csv(std::istream& in, const std::string& stream_name);

// Deduplicates (user, item) keeping the last record, binarizes ratings >=
// threshold, and removes users/items with fewer than min_interactions
// positives, re-applying until a fixpoint. Index maps are ordered by first
// appearance among the surviving positives.
InteractionMatrix binarize_and_filter(const std::vector<RatingRecord>& records, double threshold,
                                      int min_interactions, const std::string& stream_name);

std::pair<InteractionMatrix, InteractionMatrix> ingest_and_preprocess(
    std::istream& source, std::istream& target, double threshold = 4.0,
    int min_interactions = 5);

}  // namespace vdea::data

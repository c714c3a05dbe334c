#include "data/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "common/error.hpp"
#include "data/csv.hpp"

namespace vdea::data {

std::size_t InteractionMatrix::nnz() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.size();
    return n;
}

bool InteractionMatrix::has(std::uint32_t user, std::uint32_t item) const {
    const auto& r = rows[user];
    return std::binary_search(r.begin(), r.end(), item);
}

std::vector<RatingRecord> read_rating_csv(std::istream& in, const std::string& stream_name) {
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->size() != 3 || (*header)[0] != "user_id" ||
        (*header)[1] != "item_id" || (*header)[2] != "rating")
        throw DataError(stream_name + ": expected header user_id,item_id,rating");
    std::vector<RatingRecord> out;
    while (auto fields = reader.next()) {
        if (fields->size() == 1 && (*fields)[0].empty()) continue;  // blank line
        if (fields->size() != 3)
            throw DataError(stream_name + ": expected 3 fields at line " +
                            std::to_string(reader.line()));
        RatingRecord rec;
        rec.user = std::move((*fields)[0]);
        rec.item = std::move((*fields)[1]);
        if (rec.user.empty() || rec.item.empty())
            throw DataError(stream_name + ": empty id at line " + std::to_string(reader.line()));
        try {
            std::size_t used = 0;
            rec.rating = std::stod((*fields)[2], &used);
            if (used != (*fields)[2].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw DataError(stream_name + ": bad rating at line " + std::to_string(reader.line()));
        }
        if (!(rec.rating >= 1.0 && rec.rating <= 5.0))
            throw DataError(stream_name + ": rating outside [1,5] at line " +
                            std::to_string(reader.line()));
        out.push_back(std::move(rec));
    }
    return out;
}

InteractionMatrix binarize_and_filter(const std::vector<RatingRecord>& records, double threshold,
                                      int min_interactions, const std::string& stream_name) {
    require(min_interactions >= 0, "ingest: min_interactions must be nonnegative");

    // Deduplicate keeping the last rating per (user, item).
    std::unordered_map<std::string, double> last;
    std::vector<std::pair<std::string, std::string>> order;  // first-appearance order
    last.reserve(records.size());
    for (const auto& rec : records) {
        const std::string key = rec.user + '\x1f' + rec.item;
        auto [it, inserted] = last.try_emplace(key, rec.rating);
        if (inserted)
            order.emplace_back(rec.user, rec.item);
        else
            it->second = rec.rating;
    }

    struct Positive {
        std::string user, item;
    };
    std::vector<Positive> positives;
    positives.reserve(order.size());
    for (const auto& [user, item] : order) {
        if (last[user + '\x1f' + item] >= threshold) positives.push_back({user, item});
    }

    // Drop under-interacting users/items until the counts stabilize; a removal
    // can push other rows or columns below the minimum.
    std::vector<char> alive(positives.size(), 1);
    while (true) {
        std::unordered_map<std::string, int> user_count, item_count;
        for (std::size_t i = 0; i < positives.size(); ++i) {
            if (!alive[i]) continue;
            ++user_count[positives[i].user];
            ++item_count[positives[i].item];
        }
        bool changed = false;
        for (std::size_t i = 0; i < positives.size(); ++i) {
            if (!alive[i]) continue;
            if (user_count[positives[i].user] < min_interactions ||
                item_count[positives[i].item] < min_interactions) {
                alive[i] = 0;
                changed = true;
            }
        }
        if (!changed) break;
    }

    InteractionMatrix out;
    std::unordered_map<std::string, std::uint32_t> user_index, item_index;
    std::vector<std::vector<std::uint32_t>> rows;
    for (std::size_t i = 0; i < positives.size(); ++i) {
        if (!alive[i]) continue;
        auto [uit, unew] = user_index.try_emplace(positives[i].user,
                                                  static_cast<std::uint32_t>(out.user_ids.size()));
        if (unew) {
            out.user_ids.push_back(positives[i].user);
            rows.emplace_back();
        }
        auto [iit, inew] = item_index.try_emplace(positives[i].item,
                                                  static_cast<std::uint32_t>(out.item_ids.size()));
        if (inew) out.item_ids.push_back(positives[i].item);
        rows[uit->second].push_back(iit->second);
    }
    for (auto& r : rows) std::sort(r.begin(), r.end());
    out.rows = std::move(rows);
    if (out.user_count() == 0)
        throw DataError(stream_name + ": empty dataset after binarization and filtering");
    return out;
}

std::pair<InteractionMatrix, InteractionMatrix> ingest_and_preprocess(std::istream& source,
                                                                      std::istream& target,
                                                                      double threshold,
                                                                      int min_interactions) {
    auto src_records = read_rating_csv(source, "source");
    auto tgt_records = read_rating_csv(target, "target");
    return {binarize_and_filter(src_records, threshold, min_interactions, "source"),
            binarize_and_filter(tgt_records, threshold, min_interactions, "target")};
}

}  // namespace vdea::data

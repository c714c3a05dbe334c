#include "data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace vdea::data {

namespace fs = std::filesystem;
using nlohmann::json;

bool OverlapMap::source_overlapped(std::uint32_t u) const {
    return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(u, std::uint32_t{0}),
                              [](const auto& a, const auto& b) { return a.first < b.first; });
}

bool OverlapMap::target_overlapped(std::uint32_t u) const {
    for (const auto& p : pairs)
        if (p.second == u) return true;
    return false;
}

const std::vector<std::pair<std::uint32_t, std::uint32_t>>& PocdrDataset::eval_pairs(
    Domain d, bool test) const {
    if (d == Domain::source) return test ? source_test_pairs : source_val_pairs;
    return test ? target_test_pairs : target_val_pairs;
}

namespace {

std::vector<std::pair<std::uint32_t, std::uint32_t>> canonical_positives(
    const InteractionMatrix& m) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    out.reserve(m.nnz());
    for (std::uint32_t u = 0; u < m.user_count(); ++u)
        for (std::uint32_t i : m.rows[u]) out.emplace_back(u, i);
    return out;
}

void check_partition(const SplitSets& s, std::size_t nnz, const char* name) {
    std::vector<std::uint32_t> all;
    all.reserve(nnz);
    all.insert(all.end(), s.train.begin(), s.train.end());
    all.insert(all.end(), s.val.begin(), s.val.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    require(all.size() == nnz, std::string(name) + ": split sizes do not cover the positives");
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i)
        require(all[i] == i, std::string(name) + ": splits overlap or miss an index");
}

void derive_domain(const InteractionMatrix& m, const SplitSets& split,
                   std::vector<std::pair<std::uint32_t, std::uint32_t>>& positives,
                   std::vector<std::vector<std::uint32_t>>& train_rows,
                   std::vector<std::pair<std::uint32_t, std::uint32_t>>& val_pairs,
                   std::vector<std::pair<std::uint32_t, std::uint32_t>>& test_pairs) {
    positives = canonical_positives(m);
    train_rows.assign(m.user_count(), {});
    for (std::uint32_t idx : split.train) train_rows[positives[idx].first].push_back(positives[idx].second);
    for (auto& r : train_rows) std::sort(r.begin(), r.end());
    val_pairs.clear();
    test_pairs.clear();
    for (std::uint32_t idx : split.val) val_pairs.push_back(positives[idx]);
    for (std::uint32_t idx : split.test) test_pairs.push_back(positives[idx]);
    std::sort(val_pairs.begin(), val_pairs.end());
    std::sort(test_pairs.begin(), test_pairs.end());
}

}  // namespace

void PocdrDataset::finalize() {
    check_partition(source_split, source.nnz(), "source");
    check_partition(target_split, target.nnz(), "target");
    std::unordered_set<std::uint32_t> seen_src, seen_tgt;
    for (const auto& [s, t] : overlap.pairs) {
        require(s < source.user_count() && t < target.user_count(),
                "overlap: index out of range");
        require(seen_src.insert(s).second && seen_tgt.insert(t).second,
                "overlap: correspondence must be injective in both directions");
    }
    require(std::is_sorted(overlap.pairs.begin(), overlap.pairs.end()),
            "overlap: pairs must be sorted by source index");
    if (!source_labels.empty())
        require(source_labels.size() == source.user_count() &&
                    target_labels.size() == target.user_count(),
                "labels: size mismatch");
    derive_domain(source, source_split, source_positives, source_train_rows, source_val_pairs,
                  source_test_pairs);
    derive_domain(target, target_split, target_positives, target_train_rows, target_val_pairs,
                  target_test_pairs);
}

namespace {

SplitSets split_positives(std::size_t nnz, rng::Engine& eng) {
    std::vector<std::uint32_t> order(nnz);
    for (std::size_t i = 0; i < nnz; ++i) order[i] = static_cast<std::uint32_t>(i);
    eng.shuffle(order);
    const std::size_t n_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(nnz)));
    const std::size_t n_test = n_val;
    require(n_val + n_test <= nnz, "split: dataset too small for an 8:1:1 split");
    SplitSets s;
    s.val.assign(order.begin(), order.begin() + n_val);
    s.test.assign(order.begin() + n_val, order.begin() + n_val + n_test);
    s.train.assign(order.begin() + n_val + n_test, order.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

}  // namespace

PocdrDataset build_pocdr_dataset(InteractionMatrix source, InteractionMatrix target, double ku,
                                 std::uint64_t seed) {
    require(ku > 0.0 && ku < 1.0, "build: overlap ratio must lie in (0, 1)");

    std::unordered_map<std::string, std::uint32_t> target_index;
    for (std::uint32_t u = 0; u < target.user_count(); ++u) target_index[target.user_ids[u]] = u;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pool;
    for (std::uint32_t u = 0; u < source.user_count(); ++u) {
        auto it = target_index.find(source.user_ids[u]);
        if (it != target_index.end()) pool.emplace_back(u, it->second);
    }
    if (pool.empty()) throw DataError("build: the domains share no users");

    const auto want = static_cast<std::size_t>(
        std::llround(ku * static_cast<double>(pool.size())));
    rng::Engine overlap_eng(rng::mix(seed, 0x9ce5u));
    overlap_eng.shuffle(pool);
    pool.resize(want);
    std::sort(pool.begin(), pool.end());

    PocdrDataset ds;
    ds.overlap.pairs = std::move(pool);
    ds.overlap.declared_ratio = ku;
    ds.ku = ku;
    ds.seed = seed;
    rng::Engine src_eng(rng::mix(seed, 0x51u, 0));
    rng::Engine tgt_eng(rng::mix(seed, 0x51u, 1));
    ds.source_split = split_positives(source.nnz(), src_eng);
    ds.target_split = split_positives(target.nnz(), tgt_eng);
    ds.source = std::move(source);
    ds.target = std::move(target);
    ds.finalize();
    return ds;
}

std::vector<PairedBatch> make_batches(const PocdrDataset& ds, std::size_t batch_size,
                                      std::uint64_t epoch_seed) {
    const std::size_t us = ds.source.user_count();
    const std::size_t ut = ds.target.user_count();
    require(batch_size >= 1 && batch_size <= us && batch_size <= ut,
            "make_batches: batch size must not exceed either domain's user count");
    const std::size_t n_batches =
        std::max((us + batch_size - 1) / batch_size, (ut + batch_size - 1) / batch_size);

    rng::Engine eng(rng::mix(epoch_seed, 0xba7cULL));
    auto pairs = ds.overlap.pairs;
    eng.shuffle(pairs);

    std::vector<std::uint32_t> src_only, tgt_only;
    for (std::uint32_t u = 0; u < us; ++u)
        if (!ds.overlap.source_overlapped(u)) src_only.push_back(u);
    {
        std::unordered_set<std::uint32_t> tgt_overlapped;
        for (const auto& p : ds.overlap.pairs) tgt_overlapped.insert(p.second);
        for (std::uint32_t u = 0; u < ut; ++u)
            if (!tgt_overlapped.count(u)) tgt_only.push_back(u);
    }
    eng.shuffle(src_only);
    eng.shuffle(tgt_only);

    // Fallback fillers when a domain has no non-overlapped users: reuse any of
    // its users with the mask off.
    std::vector<std::uint32_t> src_fill = src_only, tgt_fill = tgt_only;
    if (src_fill.empty()) {
        for (std::uint32_t u = 0; u < us; ++u) src_fill.push_back(u);
        eng.shuffle(src_fill);
    }
    if (tgt_fill.empty()) {
        for (std::uint32_t u = 0; u < ut; ++u) tgt_fill.push_back(u);
        eng.shuffle(tgt_fill);
    }

    std::vector<PairedBatch> batches(n_batches);
    // Overlapped pairs round-robin across batches, occupying the leading rows.
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        auto& b = batches[p % n_batches];
        b.source_users.push_back(pairs[p].first);
        b.target_users.push_back(pairs[p].second);
        b.aligned.push_back(1);
    }
    std::size_t src_cursor = 0, tgt_cursor = 0;
    for (auto& b : batches) {
        while (b.source_users.size() < batch_size) {
            b.source_users.push_back(src_fill[src_cursor++ % src_fill.size()]);
            b.aligned.push_back(0);
        }
        while (b.target_users.size() < batch_size)
            b.target_users.push_back(tgt_fill[tgt_cursor++ % tgt_fill.size()]);
        b.aligned.resize(batch_size, 0);
    }
    return batches;
}

// --- binary matrix file ---

namespace {

constexpr char kMatrixMagic[4] = {'P', 'O', 'D', 'S'};
constexpr std::uint32_t kMatrixVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::istream& in, const fs::path& path) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
        throw DataError("matrix file truncated: " + path.string());
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<T>(v);
}

}  // namespace

void write_npzlike(const fs::path& path, const InteractionMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(kMatrixMagic, 4);
    put<std::uint32_t>(out, kMatrixVersion);
    put<std::uint64_t>(out, m.user_count());
    put<std::uint64_t>(out, m.item_count());
    put<std::uint64_t>(out, m.nnz());
    for (std::uint32_t u = 0; u < m.user_count(); ++u)
        for (std::uint32_t i : m.rows[u]) {
            put<std::uint32_t>(out, u);
            put<std::uint32_t>(out, i);
        }
    if (!out) throw DataError("write failed: " + path.string());
}

InteractionMatrix read_npzlike(const fs::path& path, const std::vector<std::string>& user_ids,
                               const std::vector<std::string>& item_ids) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMatrixMagic, 4) != 0)
        throw DataError("bad magic in " + path.string());
    const auto version = get<std::uint32_t>(in, path);
    if (version != kMatrixVersion)
        throw DataError("unsupported matrix version " + std::to_string(version) + " in " +
                        path.string());
    const auto rows = get<std::uint64_t>(in, path);
    const auto cols = get<std::uint64_t>(in, path);
    const auto nnz = get<std::uint64_t>(in, path);
    if (rows != user_ids.size() || cols != item_ids.size())
        throw DataError("matrix shape does not match id maps in " + path.string());
    InteractionMatrix m;
    m.user_ids = user_ids;
    m.item_ids = item_ids;
    m.rows.assign(rows, {});
    for (std::uint64_t e = 0; e < nnz; ++e) {
        const auto u = get<std::uint32_t>(in, path);
        const auto i = get<std::uint32_t>(in, path);
        if (u >= rows || i >= cols) throw DataError("entry out of range in " + path.string());
        m.rows[u].push_back(i);
    }
    for (auto& r : m.rows) {
        require(std::is_sorted(r.begin(), r.end()), "matrix rows must be sorted: " + path.string());
    }
    return m;
}

// --- directory artifacts ---

namespace {

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& l : lines) out << l << '\n';
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

json domain_meta(const InteractionMatrix& m) {
    return json{{"users", m.user_count()}, {"items", m.item_count()}, {"nnz", m.nnz()}};
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_matrix_files(const fs::path& dir, const char* tag, const InteractionMatrix& m) {
    write_npzlike(dir / (std::string(tag) + ".npzlike"), m);
    write_lines(dir / ("users_" + std::string(tag) + ".tsv"), m.user_ids);
    write_lines(dir / ("items_" + std::string(tag) + ".tsv"), m.item_ids);
}

InteractionMatrix read_matrix_files(const fs::path& dir, const char* tag) {
    const auto users = read_lines(dir / ("users_" + std::string(tag) + ".tsv"));
    const auto items = read_lines(dir / ("items_" + std::string(tag) + ".tsv"));
    return read_npzlike(dir / (std::string(tag) + ".npzlike"), users, items);
}

}  // namespace

void write_domains(const fs::path& dir, const InteractionMatrix& source,
                   const InteractionMatrix& target) {
    fs::create_directories(dir);
    json meta{{"format_version", 1},
              {"kind", "domains"},
              {"source", domain_meta(source)},
              {"target", domain_meta(target)}};
    write_json_file(dir / "meta.json", meta);
    write_matrix_files(dir, "source", source);
    write_matrix_files(dir, "target", target);
}

std::pair<InteractionMatrix, InteractionMatrix> read_domains(const fs::path& dir) {
    const json meta = read_json_file(dir / "meta.json");
    if (meta.value("kind", "") != "domains")
        throw DataError(dir.string() + ": not an ingested domain directory");
    return {read_matrix_files(dir, "source"), read_matrix_files(dir, "target")};
}

void write_dataset(const fs::path& dir, const PocdrDataset& ds) {
    fs::create_directories(dir);
    json meta{{"format_version", 1},
              {"kind", "pocdr"},
              {"k_u", ds.ku},
              {"seed", ds.seed},
              {"overlapped", ds.overlap.pairs.size()},
              {"has_labels", ds.has_labels()},
              {"source", domain_meta(ds.source)},
              {"target", domain_meta(ds.target)}};
    write_json_file(dir / "meta.json", meta);
    write_matrix_files(dir, "source", ds.source);
    write_matrix_files(dir, "target", ds.target);

    std::vector<std::string> overlap_lines;
    overlap_lines.reserve(ds.overlap.pairs.size());
    for (const auto& [s, t] : ds.overlap.pairs)
        overlap_lines.push_back(std::to_string(s) + '\t' + std::to_string(t));
    write_lines(dir / "overlap.tsv", overlap_lines);

    auto split_json = [](const SplitSets& s) {
        return json{{"train", s.train}, {"val", s.val}, {"test", s.test}};
    };
    write_json_file(dir / "splits.json",
                    json{{"source", split_json(ds.source_split)},
                         {"target", split_json(ds.target_split)}});

    if (ds.has_labels()) {
        std::vector<std::string> label_lines;
        for (std::uint32_t u = 0; u < ds.source_labels.size(); ++u)
            label_lines.push_back("S\t" + std::to_string(u) + '\t' +
                                  std::to_string(ds.source_labels[u]));
        for (std::uint32_t u = 0; u < ds.target_labels.size(); ++u)
            label_lines.push_back("T\t" + std::to_string(u) + '\t' +
                                  std::to_string(ds.target_labels[u]));
        write_lines(dir / "labels.tsv", label_lines);
    }
}

PocdrDataset read_dataset(const fs::path& dir) {
    const json meta = read_json_file(dir / "meta.json");
    if (meta.value("kind", "") != "pocdr")
        throw DataError(dir.string() + ": not a dataset directory");
    PocdrDataset ds;
    ds.ku = meta.at("k_u").get<double>();
    ds.seed = meta.at("seed").get<std::uint64_t>();
    ds.source = read_matrix_files(dir, "source");
    ds.target = read_matrix_files(dir, "target");

    for (const auto& line : read_lines(dir / "overlap.tsv")) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::uint32_t s = 0, t = 0;
        if (!(ss >> s >> t)) throw DataError("overlap.tsv: bad line '" + line + "'");
        ds.overlap.pairs.emplace_back(s, t);
    }
    ds.overlap.declared_ratio = ds.ku;

    const json splits = read_json_file(dir / "splits.json");
    auto load_split = [&](const json& j) {
        SplitSets s;
        s.train = j.at("train").get<std::vector<std::uint32_t>>();
        s.val = j.at("val").get<std::vector<std::uint32_t>>();
        s.test = j.at("test").get<std::vector<std::uint32_t>>();
        return s;
    };
    ds.source_split = load_split(splits.at("source"));
    ds.target_split = load_split(splits.at("target"));

    if (meta.value("has_labels", false)) {
        ds.source_labels.assign(ds.source.user_count(), -1);
        ds.target_labels.assign(ds.target.user_count(), -1);
        for (const auto& line : read_lines(dir / "labels.tsv")) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string tag;
            std::uint32_t u = 0;
            int label = 0;
            if (!(ss >> tag >> u >> label) || (tag != "S" && tag != "T"))
                throw DataError("labels.tsv: bad line '" + line + "'");
            auto& vec = tag == "S" ? ds.source_labels : ds.target_labels;
            if (u >= vec.size()) throw DataError("labels.tsv: user index out of range");
            vec[u] = label;
        }
    }
    ds.finalize();
    return ds;
}

}  // namespace vdea::data

#include "eval/export.hpp"

#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "common/error.hpp"
#include "train/trainer.hpp"

namespace vdea::eval {

void export_embeddings(const train::ModelParams& params, const data::PocdrDataset& ds,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());

    std::unordered_set<std::uint32_t> src_overlapped, tgt_overlapped;
    for (const auto& [s, t] : ds.overlap.pairs) {
        src_overlapped.insert(s);
        tgt_overlapped.insert(t);
    }

    const std::size_t d = params.latent_dim();
    out << "domain\tuser\toverlapped";
    for (std::size_t j = 0; j < d; ++j) out << "\tmu_" << j;
    out << '\n';

    char num[64];
    auto dump = [&](const char* tag, const ad::Tensor& latents,
                    const std::unordered_set<std::uint32_t>& overlapped) {
        for (std::size_t u = 0; u < latents.rows(); ++u) {
            out << tag << '\t' << u << '\t'
                << (overlapped.count(static_cast<std::uint32_t>(u)) ? 1 : 0);
            for (std::size_t j = 0; j < d; ++j) {
                std::snprintf(num, sizeof(num), "%.17g", latents.at(u, j));
                out << '\t' << num;
            }
            out << '\n';
        }
    };
    dump("S",
         train::encode_all_users(params.source_encoder, ds.source_train_rows,
                                 ds.source.item_count()),
         src_overlapped);
    dump("T",
         train::encode_all_users(params.target_encoder, ds.target_train_rows,
                                 ds.target.item_count()),
         tgt_overlapped);
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace vdea::eval

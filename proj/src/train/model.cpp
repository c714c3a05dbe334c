#include "train/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "common/error.hpp"

namespace vdea::train {

using ad::Tensor;

namespace {

template <typename Self, typename TensorPtr>
std::vector<std::pair<std::string, TensorPtr>> named_impl(Self& m) {
    std::vector<std::pair<std::string, TensorPtr>> out;
    auto ae = [&](const char* domain, auto& enc, auto& dec) {
        const std::string base(domain);
        out.emplace_back(base + ".encoder.hidden.weight", &enc.hidden.weight);
        out.emplace_back(base + ".encoder.hidden.bias", &enc.hidden.bias);
        out.emplace_back(base + ".encoder.heads.weight", &enc.heads.weight);
        out.emplace_back(base + ".encoder.heads.bias", &enc.heads.bias);
        out.emplace_back(base + ".decoder.hidden.weight", &dec.hidden.weight);
        out.emplace_back(base + ".decoder.hidden.bias", &dec.hidden.bias);
        out.emplace_back(base + ".decoder.output.weight", &dec.output.weight);
        out.emplace_back(base + ".decoder.output.bias", &dec.output.bias);
    };
    auto prior = [&](const char* domain, auto& p) {
        const std::string base(domain);
        out.emplace_back(base + ".prior.logits", &p.logits);
        out.emplace_back(base + ".prior.means", &p.means);
        out.emplace_back(base + ".prior.log_vars", &p.log_vars);
    };
    ae("source", m.source_encoder, m.source_decoder);
    prior("source", m.source_prior);
    ae("target", m.target_encoder, m.target_decoder);
    prior("target", m.target_prior);
    return out;
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> ModelParams::named() {
    return named_impl<ModelParams, Tensor*>(*this);
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named() const {
    return named_impl<const ModelParams, const Tensor*>(*this);
}

std::vector<Tensor*> ModelParams::all_params() {
    std::vector<Tensor*> out;
    for (auto& [name, t] : named()) out.push_back(t);
    return out;
}

std::vector<Tensor*> ModelParams::autoencoder_params() {
    std::vector<Tensor*> out;
    for (auto& [name, t] : named())
        if (name.find(".prior.") == std::string::npos) out.push_back(t);
    return out;
}

ModelParams init_model(const RunConfig& cfg, std::size_t source_items, std::size_t target_items) {
    rng::Engine eng(rng::mix(cfg.model_seed, 0x1417ULL));
    ModelParams m;
    const auto h = static_cast<std::size_t>(cfg.hidden_dim);
    const auto d = static_cast<std::size_t>(cfg.latent_dim);
    m.source_encoder = vae::make_encoder(source_items, h, d, eng);
    m.source_decoder = vae::make_decoder(d, h, source_items, eng);
    m.target_encoder = vae::make_encoder(target_items, h, d, eng);
    m.target_decoder = vae::make_decoder(d, h, target_items, eng);
    m.source_prior = vae::make_uniform_prior(static_cast<std::size_t>(cfg.clusters), d);
    m.target_prior = vae::make_uniform_prior(static_cast<std::size_t>(cfg.clusters), d);
    return m;
}

namespace {

constexpr char kMagic[4] = {'V', 'D', 'E', 'A'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    std::uint64_t bits;
    if constexpr (std::is_same_v<T, double>) {
        bits = std::bit_cast<std::uint64_t>(v);
    } else {
        bits = static_cast<std::uint64_t>(v);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
        throw DataError("checkpoint truncated: " + path.string());
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>) return std::bit_cast<double>(bits);
    else
        return static_cast<T>(bits);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    const auto tensors = params.named();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put<std::uint32_t>(out, 2);
        put<std::uint64_t>(out, t->rows());
        put<std::uint64_t>(out, t->cols());
        for (double v : t->values()) put<double>(out, v);
    }
    if (!out) throw DataError("checkpoint write failed: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read checkpoint " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("bad checkpoint magic in " + path.string());
    const auto version = get<std::uint32_t>(in, path);
    if (version != kVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    const auto count = get<std::uint32_t>(in, path);
    std::map<std::string, Tensor> loaded;
    for (std::uint32_t t = 0; t < count; ++t) {
        const auto name_len = get<std::uint32_t>(in, path);
        if (name_len > 4096) throw DataError("corrupt checkpoint name length");
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) throw DataError("checkpoint truncated: " + path.string());
        const auto rank = get<std::uint32_t>(in, path);
        if (rank != 2) throw DataError("checkpoint tensor '" + name + "' has unsupported rank");
        const auto rows = get<std::uint64_t>(in, path);
        const auto cols = get<std::uint64_t>(in, path);
        if (rows == 0 || cols == 0 || rows * cols > (1ull << 32))
            throw DataError("checkpoint tensor '" + name + "' has corrupt shape");
        Tensor tensor(rows, cols);
        for (std::size_t i = 0; i < tensor.size(); ++i) tensor[i] = get<double>(in, path);
        tensor.requires_grad = true;
        loaded.emplace(std::move(name), std::move(tensor));
    }

    auto take = [&](const std::string& name) {
        auto it = loaded.find(name);
        if (it == loaded.end())
            throw DataError("checkpoint is missing tensor '" + name + "'");
        Tensor t = std::move(it->second);
        loaded.erase(it);
        return t;
    };
    auto dims_of = [&](const std::string& name) {
        auto it = loaded.find(name);
        if (it == loaded.end())
            throw DataError("checkpoint is missing tensor '" + name + "'");
        return std::make_pair(it->second.rows(), it->second.cols());
    };

    ModelParams m;
    // Rebuild the structures with shapes taken from the stored tensors.
    const auto [src_items, hidden] = dims_of("source.encoder.hidden.weight");
    const auto [tgt_items, hidden2] = dims_of("target.encoder.hidden.weight");
    (void)hidden2;
    rng::Engine dummy(0);
    const auto [k, d] = dims_of("source.prior.means");
    m.source_encoder = vae::make_encoder(src_items, hidden, d, dummy);
    m.source_decoder = vae::make_decoder(d, hidden, src_items, dummy);
    m.target_encoder = vae::make_encoder(tgt_items, hidden, d, dummy);
    m.target_decoder = vae::make_decoder(d, hidden, tgt_items, dummy);
    m.source_prior = vae::make_uniform_prior(k, d);
    m.target_prior = vae::make_uniform_prior(k, d);

    for (auto& [name, slot] : m.named()) {
        Tensor t = take(name);
        if (t.rows() != slot->rows() || t.cols() != slot->cols())
            throw DataError("checkpoint tensor '" + name + "' has inconsistent shape " +
                            std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
        t.requires_grad = true;
        *slot = std::move(t);
    }
    if (!loaded.empty())
        throw DataError("checkpoint contains unexpected tensor '" + loaded.begin()->first + "'");
    return m;
}

void validate_model_shapes(const ModelParams& params, const RunConfig& cfg,
                           const data::PocdrDataset& ds) {
    const std::size_t d = params.latent_dim();
    if (d != static_cast<std::size_t>(cfg.latent_dim))
        throw DataError("checkpoint latent_dim=" + std::to_string(d) +
                        " does not match config latent_dim=" + std::to_string(cfg.latent_dim));
    const std::size_t k = params.source_prior.components();
    if (k != static_cast<std::size_t>(cfg.clusters))
        throw DataError("checkpoint clusters=" + std::to_string(k) +
                        " does not match config clusters=" + std::to_string(cfg.clusters));
    if (params.source_encoder.input_dim() != ds.source.item_count() ||
        params.target_encoder.input_dim() != ds.target.item_count())
        throw DataError("checkpoint item dimensions (" +
                        std::to_string(params.source_encoder.input_dim()) + ", " +
                        std::to_string(params.target_encoder.input_dim()) +
                        ") do not match dataset (" + std::to_string(ds.source.item_count()) +
                        ", " + std::to_string(ds.target.item_count()) + ")");
}

}  // namespace vdea::train

#include "vae/mlp.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace vdea::vae {

using namespace ad;

namespace {

constexpr double kLogVarClamp = 10.0;

Tensor glorot(std::size_t fan_in, std::size_t fan_out, rng::Engine& eng) {
    Tensor w(fan_in, fan_out);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = eng.uniform(-limit, limit);
    w.requires_grad = true;
    return w;
}

Tensor zero_bias(std::size_t width) {
    Tensor b(1, width);
    b.requires_grad = true;
    return b;
}

void check_finite(const Var& v, const std::string& where) {
    if (!v.val().all_finite())
        throw NumericError(where + " produced non-finite activations");
}

}  // namespace

EncoderParams make_encoder(std::size_t items, std::size_t hidden, std::size_t latent,
                           rng::Engine& eng) {
    require(items > 0 && hidden > 0 && latent > 0, "encoder: dimensions must be positive");
    EncoderParams p;
    p.hidden = {glorot(items, hidden, eng), zero_bias(hidden)};
    p.heads = {glorot(hidden, 2 * latent, eng), zero_bias(2 * latent)};
    return p;
}

DecoderParams make_decoder(std::size_t latent, std::size_t hidden, std::size_t items,
                           rng::Engine& eng) {
    require(items > 0 && hidden > 0 && latent > 0, "decoder: dimensions must be positive");
    DecoderParams p;
    p.hidden = {glorot(latent, hidden, eng), zero_bias(hidden)};
    p.output = {glorot(hidden, items, eng), zero_bias(items)};
    return p;
}

EncoderVars bind(Tape& tape, EncoderParams& p) {
    return {tape.param(p.hidden.weight), tape.param(p.hidden.bias), tape.param(p.heads.weight),
            tape.param(p.heads.bias)};
}

DecoderVars bind(Tape& tape, DecoderParams& p) {
    return {tape.param(p.hidden.weight), tape.param(p.hidden.bias), tape.param(p.output.weight),
            tape.param(p.output.bias)};
}

EncodeResult encode_reparameterize(Tape& tape, const EncoderVars& enc, Var x,
                                   const Tensor& eps_noise) {
    require(x.cols() == enc.hidden_w.rows(), "encode: input width mismatch");
    const std::size_t latent = enc.heads_w.cols() / 2;
    require(eps_noise.rows() == x.rows() && eps_noise.cols() == latent,
            "encode: noise shape mismatch");
    Var h = tanh(add(matmul(x, enc.hidden_w), enc.hidden_b));
    check_finite(h, "encoder hidden layer");
    Var heads = add(matmul(h, enc.heads_w), enc.heads_b);
    check_finite(heads, "encoder head layer");
    Var mu = slice(heads, 0, heads.rows(), 0, latent);
    Var log_var = clamp(slice(heads, 0, heads.rows(), latent, 2 * latent), -kLogVarClamp,
                        kLogVarClamp);
    Var sigma = exp(mul_scalar(log_var, 0.5));
    Var z = add(mu, mul(tape.constant(eps_noise), sigma));
    return {{mu, log_var, sigma}, z};
}

Var decode(Tape& tape, const DecoderVars& dec, Var z) {
    (void)tape;
    require(z.cols() == dec.hidden_w.rows(), "decode: latent width mismatch");
    Var h = tanh(add(matmul(z, dec.hidden_w), dec.hidden_b));
    check_finite(h, "decoder hidden layer");
    Var out = sigmoid(add(matmul(h, dec.output_w), dec.output_b));
    check_finite(out, "decoder output layer");
    return out;
}

namespace {

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> in) {
    const std::size_t rows = layer.weight.rows(), cols = layer.weight.cols();
    require(in.size() == rows, "mlp: width mismatch");
    std::vector<double> out(layer.bias.values().begin(), layer.bias.values().end());
    for (std::size_t r = 0; r < rows; ++r) {
        const double x = in[r];
        if (x == 0.0) continue;
        const double* w = layer.weight.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) out[c] += x * w[c];
    }
    return out;
}

void check_finite_vec(const std::vector<double>& v, const char* where) {
    for (double x : v)
        if (!std::isfinite(x)) throw NumericError(std::string(where) + " produced non-finite activations");
}

}  // namespace

std::vector<double> encode_mean(const EncoderParams& p, std::span<const double> row) {
    std::vector<double> h = dense_forward(p.hidden, row);
    for (double& x : h) x = std::tanh(x);
    check_finite_vec(h, "encoder hidden layer");
    std::vector<double> heads = dense_forward(p.heads, h);
    check_finite_vec(heads, "encoder head layer");
    heads.resize(p.latent_dim());
    return heads;
}

std::vector<double> decode_probs(const DecoderParams& p, std::span<const double> z) {
    std::vector<double> h = dense_forward(p.hidden, z);
    for (double& x : h) x = std::tanh(x);
    check_finite_vec(h, "decoder hidden layer");
    std::vector<double> out = dense_forward(p.output, h);
    for (double& x : out) {
        if (x >= 0.0) {
            x = 1.0 / (1.0 + std::exp(-x));
        } else {
            const double e = std::exp(x);
            x = e / (1.0 + e);
        }
    }
    check_finite_vec(out, "decoder output layer");
    return out;
}

}  // namespace vdea::vae

#include "pyratext/encoder.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/ops.hpp"

#include <cmath>
#include <vector>

namespace pyratext {

void EncoderConfig::validate() const {
    if (vocab_size < 2) throw ConfigError("encoder: vocab_size must be >= 2");
    if (layers < 1) throw ConfigError("encoder: layers must be >= 1");
    if (dim < 1 || heads < 1 || dim % heads != 0)
        throw ConfigError("encoder: dim " + std::to_string(dim) + " must be divisible by heads " +
                          std::to_string(heads));
    if (ffn_dim < 1) throw ConfigError("encoder: ffn_dim must be >= 1");
    if (max_len < 1) throw ConfigError("encoder: max_len must be >= 1");
    if (!(ln_eps > 0.0)) throw ConfigError("encoder: ln_eps must be > 0");
}

EncoderParams EncoderParams::shaped(const EncoderConfig& c) {
    c.validate();
    EncoderParams p;
    p.token_embedding = Tensor::zeros({c.vocab_size, c.dim});
    p.position_embedding = Tensor::zeros({c.max_len, c.dim});
    for (std::size_t l = 0; l < c.layers; ++l) {
        EncoderBlockParams b;
        b.wq = Tensor::zeros({c.dim, c.dim});
        b.bq = Tensor::zeros({1, c.dim});
        b.wk = Tensor::zeros({c.dim, c.dim});
        b.bk = Tensor::zeros({1, c.dim});
        b.wv = Tensor::zeros({c.dim, c.dim});
        b.bv = Tensor::zeros({1, c.dim});
        b.wo = Tensor::zeros({c.dim, c.dim});
        b.bo = Tensor::zeros({1, c.dim});
        b.ln1_gain = Tensor::filled({1, c.dim}, 1.0);
        b.ln1_bias = Tensor::zeros({1, c.dim});
        b.w1 = Tensor::zeros({c.dim, c.ffn_dim});
        b.b1 = Tensor::zeros({1, c.ffn_dim});
        b.w2 = Tensor::zeros({c.ffn_dim, c.dim});
        b.b2 = Tensor::zeros({1, c.dim});
        b.ln2_gain = Tensor::filled({1, c.dim}, 1.0);
        b.ln2_bias = Tensor::zeros({1, c.dim});
        p.blocks.push_back(std::move(b));
    }
    return p;
}

void EncoderParams::register_into(ParamSet& set, const std::string& prefix) const {
    set.add(prefix + "token_embedding", token_embedding, ParamKind::embedding);
    set.add(prefix + "position_embedding", position_embedding, ParamKind::embedding);
    for (std::size_t l = 0; l < blocks.size(); ++l) {
        const auto& b = blocks[l];
        const std::string p = prefix + "block" + std::to_string(l) + ".";
        set.add(p + "wq", b.wq);
        set.add(p + "bq", b.bq, ParamKind::bias);
        set.add(p + "wk", b.wk);
        set.add(p + "bk", b.bk, ParamKind::bias);
        set.add(p + "wv", b.wv);
        set.add(p + "bv", b.bv, ParamKind::bias);
        set.add(p + "wo", b.wo);
        set.add(p + "bo", b.bo, ParamKind::bias);
        set.add(p + "ln1_gain", b.ln1_gain, ParamKind::gain);
        set.add(p + "ln1_bias", b.ln1_bias, ParamKind::bias);
        set.add(p + "w1", b.w1);
        set.add(p + "b1", b.b1, ParamKind::bias);
        set.add(p + "w2", b.w2);
        set.add(p + "b2", b.b2, ParamKind::bias);
        set.add(p + "ln2_gain", b.ln2_gain, ParamKind::gain);
        set.add(p + "ln2_bias", b.ln2_bias, ParamKind::bias);
    }
}

Tensor embed(Tape& tape, const EncoderParams& params, std::span<const std::int64_t> ids) {
    if (ids.empty()) throw ContractError("embed: empty token sequence");
    const std::size_t max_len = params.position_embedding.rows();
    if (ids.size() > max_len)
        throw ContractError("embed: sequence of " + std::to_string(ids.size()) + " exceeds max_len " +
                            std::to_string(max_len));
    std::vector<std::int64_t> positions(ids.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<std::int64_t>(i);
    return ops::add(tape, ops::gather_rows(tape, params.token_embedding, ids),
                    ops::gather_rows(tape, params.position_embedding, positions));
}

namespace {

Tensor linear(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b) {
    return ops::add_row(tape, ops::matmul(tape, x, w), b);
}

Tensor layer_norm(Tape& tape, const Tensor& x, const Tensor& gain, const Tensor& bias, double eps,
                  EncodeTrace* trace) {
    Tensor z = ops::normalize_rows(tape, x, eps);
    if (trace) trace->normalized.push_back(z);
    return ops::add_row(tape, ops::mul_row(tape, z, gain), bias);
}

Tensor self_attention(Tape& tape, const Tensor& x, const EncoderBlockParams& b, std::size_t heads,
                      std::vector<Tensor>* weights_out) {
    const std::size_t d = x.cols();
    const std::size_t dh = d / heads;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
    Tensor q = linear(tape, x, b.wq, b.bq);
    Tensor k = linear(tape, x, b.wk, b.bk);
    Tensor v = linear(tape, x, b.wv, b.bv);
    std::vector<Tensor> outs;
    outs.reserve(heads);
    for (std::size_t h = 0; h < heads; ++h) {
        Tensor qh = ops::slice_last(tape, q, h * dh, dh);
        Tensor kh = ops::slice_last(tape, k, h * dh, dh);
        Tensor vh = ops::slice_last(tape, v, h * dh, dh);
        Tensor scores = ops::scale(tape, ops::matmul(tape, qh, ops::transpose(tape, kh)), inv_sqrt);
        Tensor attn = ops::softmax_rows(tape, scores);
        if (weights_out) weights_out->push_back(attn);
        outs.push_back(ops::matmul(tape, attn, vh));
    }
    Tensor merged = heads == 1 ? outs.front() : ops::concat_last(tape, outs);
    return linear(tape, merged, b.wo, b.bo);
}

} // namespace

LayerStates encode(Tape& tape, const EncoderParams& params, const EncoderConfig& config, const Tensor& embedded,
                   EncodeTrace* trace) {
    if (embedded.rank() != 2 || embedded.cols() != config.dim)
        throw DimensionError("encode: expected n x " + std::to_string(config.dim) + " input, got " +
                             shape_str(embedded.shape()));
    if (params.blocks.size() != config.layers)
        throw DimensionError("encode: parameter block count does not match config.layers");
    LayerStates states;
    Tensor x = embedded;
    for (const auto& b : params.blocks) {
        std::vector<Tensor> weights;
        Tensor attn = self_attention(tape, x, b, config.heads, trace ? &weights : nullptr);
        if (trace) trace->attention.push_back(std::move(weights));
        x = layer_norm(tape, ops::add(tape, x, attn), b.ln1_gain, b.ln1_bias, config.ln_eps, trace);
        Tensor hidden = ops::relu(tape, linear(tape, x, b.w1, b.b1));
        Tensor ffn = linear(tape, hidden, b.w2, b.b2);
        x = layer_norm(tape, ops::add(tape, x, ffn), b.ln2_gain, b.ln2_bias, config.ln_eps, trace);
        states.layers.push_back(x);
    }
    return states;
}

} // namespace pyratext

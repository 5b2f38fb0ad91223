#pragma once

#include "pyratext/params.hpp"
#include "pyratext/tape.hpp"
#include "pyratext/tensor.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pyratext {

struct EncoderConfig {
    std::size_t vocab_size = 0;
    std::size_t layers = 4;   // L
    std::size_t dim = 64;     // d == d_h
    std::size_t heads = 4;
    std::size_t ffn_dim = 128;
    std::size_t max_len = 64;
    double ln_eps = 1e-12;

    void validate() const;
};

struct EncoderBlockParams {
    Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    Tensor ln1_gain, ln1_bias;
    Tensor w1, b1, w2, b2;
    Tensor ln2_gain, ln2_bias;
};

struct EncoderParams {
    Tensor token_embedding;    // |V| x d
    Tensor position_embedding; // max_len x d
    std::vector<EncoderBlockParams> blocks;

    /// Correctly shaped parameters: zeros everywhere except layer-norm gains (ones).
    static EncoderParams shaped(const EncoderConfig& config);
    void register_into(ParamSet& set, const std::string& prefix) const;
};

/// Hidden states H^1..H^L, one n x d_h tensor per block.
struct LayerStates {
    std::vector<Tensor> layers;

    std::size_t size() const { return layers.size(); }
    std::size_t tokens() const { return layers.front().rows(); }
    std::size_t width() const { return layers.front().cols(); }
};

/// Optional intermediate values captured during encode() for inspection.
struct EncodeTrace {
    /// attention[layer][head] : n x n, rows sum to 1
    std::vector<std::vector<Tensor>> attention;
    /// Layer-norm outputs before gain/bias, two per block.
    std::vector<Tensor> normalized;
};

/// Row i = token_embedding[ids[i]] + position_embedding[i].
Tensor embed(Tape& tape, const EncoderParams& params, std::span<const std::int64_t> ids);

/// L post-norm transformer blocks with full bidirectional attention:
/// x -> LN(x + MHA(x)) -> LN(. + FFN(.)).
LayerStates encode(Tape& tape, const EncoderParams& params, const EncoderConfig& config, const Tensor& embedded,
                   EncodeTrace* trace = nullptr);

} // namespace pyratext

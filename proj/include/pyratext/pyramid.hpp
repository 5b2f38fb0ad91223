#pragma once

#include "pyratext/encoder.hpp"
#include "pyratext/ops.hpp"
#include "pyratext/params.hpp"

#include <string>
#include <vector>

namespace pyratext {

// Top-down feature pyramid over encoder layer states. Level l (1-based) works
// at scale s_l = 2^(l-1) tokens per unit, so it has ceil(n / s_l) rows.

struct PyramidParams {
    std::vector<Tensor> lateral; // W^l, d_h x d_p, index l-1
    Tensor fuse;                 // W_phi, (L*d_p) x d_p

    static PyramidParams shaped(std::size_t levels, std::size_t d_h, std::size_t d_p);
    std::size_t levels() const { return lateral.size(); }
    void register_into(ParamSet& set, const std::string& prefix) const;
};

struct PyramidLevel {
    std::size_t level = 1; // 1-based
    std::size_t scale = 1; // 2^(level-1)
    Tensor features;       // ceil(n/scale) x d_p
};

inline std::size_t level_scale(std::size_t level) { return std::size_t{1} << (level - 1); }
inline std::size_t level_rows(std::size_t n, std::size_t level) {
    const auto s = level_scale(level);
    return (n + s - 1) / s;
}

/// Mean pooling over non-overlapping windows of `s` rows.
Tensor downscale(Tape& tape, const Tensor& h, std::size_t s);

/// Nearest-neighbour expansion to `target_n` rows at factor `s`.
Tensor up(Tape& tape, const Tensor& f, std::size_t s, std::size_t target_n);

/// F^L = phi(down(H^L) W^L); F^l = phi(down(H^l) W^l + Up(F^{l+1})) for l < L.
std::vector<PyramidLevel> top_down_fuse(Tape& tape, const LayerStates& layers, const PyramidParams& params,
                                        Activation phi = Activation::relu);

/// Upsample every level to full resolution, concatenate (width L*d_p) and
/// project through W_phi with relu.
Tensor fuse_all(Tape& tape, const std::vector<PyramidLevel>& levels, const Tensor& fuse_weight,
                Activation phi = Activation::relu);

} // namespace pyratext

#include "pyratext/pyramid.hpp"

#include "pyratext/errors.hpp"

namespace pyratext {

PyramidParams PyramidParams::shaped(std::size_t levels, std::size_t d_h, std::size_t d_p) {
    if (levels < 1) throw ConfigError("pyramid: need at least one level");
    if (d_h < 1 || d_p < 1) throw ConfigError("pyramid: widths must be >= 1");
    PyramidParams p;
    for (std::size_t l = 0; l < levels; ++l) p.lateral.push_back(Tensor::zeros({d_h, d_p}));
    p.fuse = Tensor::zeros({levels * d_p, d_p});
    return p;
}

void PyramidParams::register_into(ParamSet& set, const std::string& prefix) const {
    for (std::size_t l = 0; l < lateral.size(); ++l) set.add(prefix + "lateral" + std::to_string(l + 1), lateral[l]);
    set.add(prefix + "fuse", fuse);
}

Tensor downscale(Tape& tape, const Tensor& h, std::size_t s) {
    if (s == 1) return h;
    return ops::pool_rows(tape, h, s);
}

Tensor up(Tape& tape, const Tensor& f, std::size_t s, std::size_t target_n) {
    if (f.rows() == target_n && s == 1) return f;
    return ops::repeat_rows(tape, f, s, target_n);
}

std::vector<PyramidLevel> top_down_fuse(Tape& tape, const LayerStates& layers, const PyramidParams& params,
                                        Activation phi) {
    const std::size_t L = layers.size();
    if (L == 0) throw DimensionError("top_down_fuse: no layer states");
    if (params.levels() != L)
        throw DimensionError("top_down_fuse: " + std::to_string(L) + " layer states but " +
                             std::to_string(params.levels()) + " lateral weights");
    const std::size_t n = layers.tokens();
    for (std::size_t l = 0; l < L; ++l) {
        const auto& h = layers.layers[l];
        if (h.rank() != 2 || h.rows() != n || h.cols() != params.lateral[l].rows())
            throw DimensionError("top_down_fuse: level " + std::to_string(l + 1) + " state " +
                                 shape_str(h.shape()) + " vs lateral " + shape_str(params.lateral[l].shape()));
    }

    std::vector<PyramidLevel> levels(L);
    for (std::size_t idx = L; idx-- > 0;) {
        const std::size_t level = idx + 1;
        const std::size_t s = level_scale(level);
        Tensor pre = ops::matmul(tape, downscale(tape, layers.layers[idx], s), params.lateral[idx]);
        if (level < L) pre = ops::add(tape, pre, up(tape, levels[idx + 1].features, 2, pre.rows()));
        levels[idx] = PyramidLevel{level, s, activate(tape, pre, phi)};
    }
    return levels;
}

Tensor fuse_all(Tape& tape, const std::vector<PyramidLevel>& levels, const Tensor& fuse_weight, Activation phi) {
    if (levels.empty()) throw DimensionError("fuse_all: no pyramid levels");
    const std::size_t n = levels.front().features.rows();
    std::vector<Tensor> full;
    full.reserve(levels.size());
    for (const auto& lv : levels) full.push_back(up(tape, lv.features, lv.scale, n));
    Tensor spliced = full.size() == 1 ? full.front() : ops::concat_last(tape, full);
    if (spliced.cols() != fuse_weight.rows())
        throw DimensionError("fuse_all: concatenated width " + std::to_string(spliced.cols()) +
                             " vs fuse weight " + shape_str(fuse_weight.shape()));
    return activate(tape, ops::matmul(tape, spliced, fuse_weight), phi);
}

} // namespace pyratext

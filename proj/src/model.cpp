#include "pyratext/model.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/ops.hpp"
#include "pyratext/rng.hpp"

#include <algorithm>
#include <cmath>

namespace pyratext {

Model::Model(ModelConfig config) : config_(std::move(config)) {
    config_.validate();
    const auto& e = config_.encoder;
    encoder_ = EncoderParams::shaped(e);
    pyramid_ = PyramidParams::shaped(e.layers, e.dim, config_.pyramid_dim);
    gnn_ = GnnParams::shaped(config_.pyramid_dim, config_.gnn_dim, config_.gnn_layers);
    head_ = ClassifierParams::shaped(config_.gnn_dim, config_.num_classes);
    encoder_.register_into(params_, "encoder.");
    pyramid_.register_into(params_, "pyramid.");
    gnn_.register_into(params_, "gnn.");
    head_.register_into(params_, "head.");
}

TextGraph Model::graph_for(const Tensor& fused) const {
    const std::size_t n = fused.rows();
    auto it = topology_cache_.find(n);
    if (it == topology_cache_.end()) it = topology_cache_.emplace(n, window_topology(n, config_.window)).first;
    TextGraph g = it->second;
    g.node_features = fused;
    if (config_.knn && n >= 2) g = add_knn_edges(g, config_.knn_k);
    return g;
}

ForwardTrace Model::forward(Tape& tape, std::span<const std::int64_t> ids) const {
    ForwardTrace t;
    Tensor embedded = embed(tape, encoder_, ids);
    t.states = encode(tape, encoder_, config_.encoder, embedded);
    t.levels = top_down_fuse(tape, t.states, pyramid_);
    t.fused = fuse_all(tape, t.levels, pyramid_.fuse);
    t.graph = graph_for(t.fused);
    t.node_states = propagate_stack(tape, t.graph, t.fused, gnn_);
    t.document = readout(tape, t.node_states);
    t.logits = class_logits(tape, t.document, head_);
    return t;
}

Tensor Model::logits(Tape& tape, std::span<const std::int64_t> ids) const { return forward(tape, ids).logits; }

Prediction Model::predict(std::span<const std::int64_t> ids) const {
    Tape off(false);
    return predict_from_logits(logits(off, ids));
}

Model Model::clone() const {
    Model copy(config_);
    auto& dst = copy.params_.items();
    const auto& src = params_.items();
    for (std::size_t i = 0; i < src.size(); ++i)
        std::copy(src[i].value.data().begin(), src[i].value.data().end(), dst[i].value.data().begin());
    return copy;
}

void init_params(ParamSet& params, std::uint64_t seed) {
    Rng rng(seed);
    for (auto& p : params.items()) {
        auto data = p.value.data();
        switch (p.kind) {
        case ParamKind::bias:
            std::fill(data.begin(), data.end(), 0.0);
            break;
        case ParamKind::gain:
            std::fill(data.begin(), data.end(), 1.0);
            break;
        case ParamKind::embedding:
            for (auto& v : data) v = rng.normal(0.0, 0.02);
            break;
        case ParamKind::weight: {
            const auto fan_in = static_cast<double>(p.value.rows());
            const auto fan_out = static_cast<double>(p.value.cols());
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            for (auto& v : data) v = rng.uniform(-bound, bound);
            break;
        }
        }
        p.value.clear_grad();
    }
}

Model make_model(const ModelConfig& config, std::uint64_t seed) {
    Model m(config);
    init_params(m.params(), seed);
    return m;
}

} // namespace pyratext

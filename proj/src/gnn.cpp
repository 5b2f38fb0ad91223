#include "pyratext/gnn.hpp"

#include "pyratext/errors.hpp"

namespace pyratext {

GnnParams GnnParams::shaped(std::size_t input_dim, std::size_t hidden_dim, std::size_t layers) {
    if (layers < 1) throw ConfigError("gnn: need at least one layer");
    if (input_dim < 1 || hidden_dim < 1) throw ConfigError("gnn: widths must be >= 1");
    GnnParams p;
    for (std::size_t k = 0; k < layers; ++k) p.weights.push_back(Tensor::zeros({k == 0 ? input_dim : hidden_dim, hidden_dim}));
    return p;
}

void GnnParams::register_into(ParamSet& set, const std::string& prefix) const {
    for (std::size_t k = 0; k < weights.size(); ++k) set.add(prefix + "w" + std::to_string(k), weights[k]);
}

Tensor graph_aggregate(Tape& tape, const Tensor& x, const TextGraph& graph) {
    if (x.rank() != 2 || x.rows() != graph.num_nodes())
        throw DimensionError("graph_aggregate: features " + shape_str(x.shape()) + " for " +
                             std::to_string(graph.num_nodes()) + " nodes");
    const std::size_t n = x.rows(), d = x.cols();
    Tensor y = Tensor::zeros({n, d});
    for (std::size_t v = 0; v < n; ++v) {
        double* out = y.data().data() + v * d;
        for (const auto& nb : graph.neighbors[v]) {
            const double* in = x.data().data() + nb.node * d;
            const double w = 1.0 / nb.norm;
            for (std::size_t j = 0; j < d; ++j) out[j] += w * in[j];
        }
        const double* self = x.data().data() + v * d;
        for (std::size_t j = 0; j < d; ++j) out[j] += self[j];
    }
    if (tape.wants({&x})) {
        auto nbrs = graph.neighbors;
        tape.record({x}, y, [x = Tensor(x), nbrs, n, d](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            // d x_u = dy_u + sum_{v : u in N(v)} dy_v / c_vu; adjacency is symmetric.
            for (std::size_t u = 0; u < n; ++u) {
                for (const auto& nb : nbrs[u]) {
                    const double w = 1.0 / nb.norm;
                    for (std::size_t j = 0; j < d; ++j) g[u * d + j] += w * dy[nb.node * d + j];
                }
                for (std::size_t j = 0; j < d; ++j) g[u * d + j] += dy[u * d + j];
            }
        });
    }
    return y;
}

Tensor propagate(Tape& tape, const TextGraph& graph, const Tensor& h, const Tensor& weight, Activation act) {
    if (h.rank() != 2 || weight.rank() != 2 || h.cols() != weight.rows())
        throw DimensionError("propagate: node states " + shape_str(h.shape()) + " vs weight " +
                             shape_str(weight.shape()));
    return activate(tape, graph_aggregate(tape, ops::matmul(tape, h, weight), graph), act);
}

Tensor propagate_stack(Tape& tape, const TextGraph& graph, const Tensor& h0, const GnnParams& params,
                       Activation act) {
    if (params.layers() == 0) throw ConfigError("propagate_stack: no layers");
    Tensor h = h0;
    for (const auto& w : params.weights) h = propagate(tape, graph, h, w, act);
    return h;
}

} // namespace pyratext

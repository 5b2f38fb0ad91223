#pragma once

#include "pyratext/graph.hpp"
#include "pyratext/ops.hpp"
#include "pyratext/params.hpp"

#include <string>
#include <vector>

namespace pyratext {

struct GnnParams {
    std::vector<Tensor> weights; // W^(k): d_k x d_{k+1}

    static GnnParams shaped(std::size_t input_dim, std::size_t hidden_dim, std::size_t layers);
    std::size_t layers() const { return weights.size(); }
    void register_into(ParamSet& set, const std::string& prefix) const;
};

/// out_v = x_v + sum_{u in N(v)} x_u / c_vu, neighbours in ascending index order.
Tensor graph_aggregate(Tape& tape, const Tensor& x, const TextGraph& graph);

/// One message-passing layer:
///   h'_v = act( sum_{u in N(v)} (1/c_vu) W h_u + W h_v )
/// with a single W shared between neighbour and self terms. Node states are
/// rows, so W h_u is computed as h_u W.
Tensor propagate(Tape& tape, const TextGraph& graph, const Tensor& h, const Tensor& weight,
                 Activation act = Activation::relu);

/// K sequential propagate() calls.
Tensor propagate_stack(Tape& tape, const TextGraph& graph, const Tensor& h0, const GnnParams& params,
                       Activation act = Activation::relu);

} // namespace pyratext

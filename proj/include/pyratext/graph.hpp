#pragma once

#include "pyratext/tensor.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pyratext {

struct Neighbor {
    std::size_t node = 0;
    double norm = 1.0; // c_vu
};

/// Undirected text graph over token positions.
///
/// `edges` holds each undirected pair once as (u, v) with u < v, sorted.
/// `neighbors[v]` lists both directions, ascending by node index, each with
/// its normalisation constant c_vu = sqrt(deg(v) * deg(u)). Self-loops are
/// never stored; propagation adds the self term explicitly.
struct TextGraph {
    Tensor node_features;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::size_t> degrees;
    std::vector<std::vector<Neighbor>> neighbors;

    std::size_t num_nodes() const { return degrees.size(); }
    bool adjacent(std::size_t u, std::size_t v) const;
    /// c_vu for an existing edge; throws ContractError otherwise.
    double norm(std::size_t v, std::size_t u) const;
};

/// Graph from an arbitrary undirected edge list: normalises pair order,
/// sorts, drops duplicates, then derives degrees and normalisers.
/// Throws ContractError on self-pairs or out-of-range nodes.
TextGraph graph_from_edges(Tensor node_features, std::size_t num_nodes,
                           std::vector<std::pair<std::size_t, std::size_t>> edges);

/// Edge (i, j) iff 0 < |i - j| < w, over n = rows(features) nodes.
TextGraph build_window_graph(const Tensor& features, std::size_t w);

/// Topology-only window graph (features left as a 1x1 placeholder).
TextGraph window_topology(std::size_t n, std::size_t w);

/// Union in, for every node, its k most cosine-similar nodes among those not
/// already adjacent. Ties go to the lower index; zero vectors have similarity 0.
TextGraph add_knn_edges(const TextGraph& graph, std::size_t k);

/// First violated invariant, or nullopt when the graph is consistent.
std::optional<std::string> validate(const TextGraph& graph);

/// Text edge list: "n d_p" header, then one "u v c_vu" line per edge.
std::string dump_edge_list(const TextGraph& graph);

} // namespace pyratext

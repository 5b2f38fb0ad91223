#include "pyratext/graph.hpp"

#include "pyratext/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace pyratext {

bool TextGraph::adjacent(std::size_t u, std::size_t v) const {
    if (u >= num_nodes()) return false;
    const auto& nb = neighbors[u];
    return std::any_of(nb.begin(), nb.end(), [v](const Neighbor& x) { return x.node == v; });
}

double TextGraph::norm(std::size_t v, std::size_t u) const {
    if (v < num_nodes())
        for (const auto& x : neighbors[v])
            if (x.node == u) return x.norm;
    throw ContractError("no edge between " + std::to_string(v) + " and " + std::to_string(u));
}

TextGraph graph_from_edges(Tensor node_features, std::size_t num_nodes,
                           std::vector<std::pair<std::size_t, std::size_t>> edges) {
    for (auto& [u, v] : edges) {
        if (u == v) throw ContractError("self-pair (" + std::to_string(u) + "," + std::to_string(v) + ")");
        if (u >= num_nodes || v >= num_nodes)
            throw ContractError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") outside " +
                                std::to_string(num_nodes) + " nodes");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    TextGraph g;
    g.node_features = std::move(node_features);
    g.edges = std::move(edges);
    g.degrees.assign(num_nodes, 0);
    for (const auto& [u, v] : g.edges) {
        ++g.degrees[u];
        ++g.degrees[v];
    }
    g.neighbors.assign(num_nodes, {});
    for (const auto& [u, v] : g.edges) {
        const double c = std::sqrt(static_cast<double>(g.degrees[u]) * static_cast<double>(g.degrees[v]));
        g.neighbors[u].push_back(Neighbor{v, c});
        g.neighbors[v].push_back(Neighbor{u, c});
    }
    for (auto& nb : g.neighbors)
        std::sort(nb.begin(), nb.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    return g;
}

TextGraph window_topology(std::size_t n, std::size_t w) {
    if (w < 2) throw ConfigError("window graph needs w >= 2");
    if (n < 1) throw ContractError("window graph needs at least one node");
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n && j - i < w; ++j) edges.emplace_back(i, j);
    return graph_from_edges(Tensor::zeros({1, 1}), n, std::move(edges));
}

TextGraph build_window_graph(const Tensor& features, std::size_t w) {
    TextGraph g = window_topology(features.rows(), w);
    g.node_features = features;
    return g;
}

TextGraph add_knn_edges(const TextGraph& graph, std::size_t k) {
    const std::size_t n = graph.num_nodes();
    if (k < 1) throw ConfigError("knn: k must be >= 1");
    if (n < 2) throw ContractError("knn: need at least two nodes");
    const Tensor& f = graph.node_features;
    if (f.rank() != 2 || f.rows() != n)
        throw DimensionError("knn: node features " + shape_str(f.shape()) + " vs " + std::to_string(n) + " nodes");
    const std::size_t d = f.cols();

    std::vector<double> norms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += f[i * d + j] * f[i * d + j];
        norms[i] = std::sqrt(s);
    }
    auto cosine = [&](std::size_t a, std::size_t b) {
        if (norms[a] == 0.0 || norms[b] == 0.0) return 0.0;
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += f[a * d + j] * f[b * d + j];
        return s / (norms[a] * norms[b]);
    };

    auto edges = graph.edges;
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::pair<double, std::size_t>> cand;
        for (std::size_t u = 0; u < n; ++u)
            if (u != v && !graph.adjacent(v, u)) cand.emplace_back(cosine(v, u), u);
        std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t i = 0; i < std::min(k, cand.size()); ++i) edges.emplace_back(v, cand[i].second);
    }
    return graph_from_edges(graph.node_features, n, std::move(edges));
}

std::optional<std::string> validate(const TextGraph& g) {
    const std::size_t n = g.degrees.size();
    if (g.neighbors.size() != n)
        return "neighbor table has " + std::to_string(g.neighbors.size()) + " rows for " + std::to_string(n) +
               " nodes";
    if (g.node_features.rank() == 2 && g.node_features.rows() != n && g.node_features.numel() != 1)
        return "node features have " + std::to_string(g.node_features.rows()) + " rows for " + std::to_string(n) +
               " nodes";
    std::vector<std::size_t> counted(n, 0);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto [u, v] = g.edges[i];
        const std::string pair = "(" + std::to_string(u) + "," + std::to_string(v) + ")";
        if (u == v) return "self-pair " + pair;
        if (u > v) return "unordered edge " + pair;
        if (v >= n) return "edge " + pair + " references a missing node";
        if (i > 0 && g.edges[i - 1] == g.edges[i]) return "duplicate edge " + pair;
        if (i > 0 && g.edges[i - 1] > g.edges[i]) return "edge list not sorted at " + pair;
        ++counted[u];
        ++counted[v];
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (g.degrees[v] != counted[v])
            return "degree of node " + std::to_string(v) + " is " + std::to_string(g.degrees[v]) + " but " +
                   std::to_string(counted[v]) + " edges touch it";
        if (g.neighbors[v].size() != counted[v])
            return "node " + std::to_string(v) + " lists " + std::to_string(g.neighbors[v].size()) +
                   " neighbors for degree " + std::to_string(counted[v]);
    }
    for (std::size_t v = 0; v < n; ++v) {
        for (const auto& nb : g.neighbors[v]) {
            const std::size_t u = nb.node;
            const std::string pair = "(" + std::to_string(v) + "," + std::to_string(u) + ")";
            if (u >= n) return "neighbor " + pair + " references a missing node";
            const auto key = std::minmax(u, v);
            if (!std::binary_search(g.edges.begin(), g.edges.end(), std::pair<std::size_t, std::size_t>(key)))
                return "neighbor " + pair + " has no edge";
            const double expect =
                std::sqrt(static_cast<double>(g.degrees[v]) * static_cast<double>(g.degrees[u]));
            if (nb.norm != expect)
                return "normalizer c" + pair + " = " + std::to_string(nb.norm) + ", expected " +
                       std::to_string(expect);
            double back = -1.0;
            for (const auto& x : g.neighbors[u])
                if (x.node == v) back = x.norm;
            if (back != nb.norm) return "asymmetric normalizer " + pair;
        }
    }
    return std::nullopt;
}

std::string dump_edge_list(const TextGraph& g) {
    std::string out = std::to_string(g.num_nodes()) + " " +
                      std::to_string(g.node_features.rank() == 2 ? g.node_features.cols() : 0) + "\n";
    char buf[96];
    for (const auto& [u, v] : g.edges) {
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", u, v, g.norm(u, v));
        out += buf;
    }
    return out;
}

} // namespace pyratext

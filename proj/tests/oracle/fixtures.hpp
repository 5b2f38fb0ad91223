#pragma once

// Random inputs shared by unit and acceptance tests.

#include "pyratext/graph.hpp"
#include "pyratext/metrics.hpp"
#include "pyratext/rng.hpp"

#include <numeric>
#include <vector>

namespace fixtures {

inline pyratext::Tensor random_matrix(pyratext::Rng& rng, std::size_t rows, std::size_t cols, double lo = -2.0,
                                      double hi = 2.0) {
    auto t = pyratext::Tensor::zeros({rows, cols});
    for (auto& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

/// Erdos-Renyi style graph on n nodes with edge probability p.
inline pyratext::TextGraph random_graph(pyratext::Rng& rng, std::size_t n, double p) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (rng.uniform() < p) edges.push_back({a, b});
    return pyratext::graph_from_edges(pyratext::Tensor::zeros({n, 1}), n, std::move(edges));
}

/// Node v of the result is node perm^-1(v) of the input: edge (a, b) moves to
/// (perm[a], perm[b]).
inline pyratext::TextGraph permute_graph(const pyratext::TextGraph& g, const std::vector<std::size_t>& perm) {
    auto edges = g.edges;
    for (auto& [a, b] : edges) a = perm[a], b = perm[b];
    return pyratext::graph_from_edges(pyratext::Tensor::zeros({g.num_nodes(), 1}), g.num_nodes(), std::move(edges));
}

/// Row perm[i] of the result is row i of x.
inline pyratext::Tensor permute_rows(const pyratext::Tensor& x, const std::vector<std::size_t>& perm) {
    auto out = pyratext::Tensor::zeros(x.shape());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t c = 0; c < x.cols(); ++c) out.at(perm[i], c) = x.at(i, c);
    return out;
}

inline std::vector<std::size_t> random_permutation(pyratext::Rng& rng, std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    return perm;
}

/// Valid records; with `ties` the raw scores are coarse so equal scores and
/// argmax ties are common.
inline std::vector<pyratext::EvalRecord> random_records(pyratext::Rng& rng, std::size_t count, std::size_t classes,
                                                        bool ties) {
    std::vector<pyratext::EvalRecord> out(count);
    for (auto& r : out) {
        r.true_label = static_cast<std::size_t>(rng.below(classes));
        r.probs.resize(classes);
        double sum = 0;
        for (auto& p : r.probs) {
            p = ties ? static_cast<double>(1 + rng.below(3)) : rng.uniform(0.01, 1.0);
            sum += p;
        }
        for (auto& p : r.probs) p /= sum;
    }
    return out;
}

} // namespace fixtures

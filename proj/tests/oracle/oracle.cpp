#include "oracle.hpp"

#include "pyratext/errors.hpp"

#include <cmath>

namespace oracle {

using pyratext::Tensor;

Tensor oracle_propagate(const pyratext::TextGraph& graph, const Tensor& h, const Tensor& weight,
                        pyratext::Activation act) {
    const std::size_t n = h.rows(), din = h.cols(), dout = weight.cols();
    if (n > kMaxNodes) throw TestScaleError("oracle_propagate: more than 64 nodes");
    if (weight.rows() != din) throw pyratext::DimensionError("oracle_propagate: weight rows != feature width");

    std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
    for (const auto& [a, b] : graph.edges) adj[a][b] = adj[b][a] = 1;
    std::vector<double> deg(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = 0; u < n; ++u) deg[v] += adj[v][u];

    // Wh_u for every node: (W^T h_u)_j = sum_i h_u,i W_ij.
    std::vector<std::vector<double>> wh(n, std::vector<double>(dout, 0.0));
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t j = 0; j < dout; ++j)
            for (std::size_t i = 0; i < din; ++i) wh[u][j] += h.at(u, i) * weight.at(i, j);

    Tensor out = Tensor::zeros({n, dout});
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t j = 0; j < dout; ++j) {
            double acc = 0.0;
            for (std::size_t u = 0; u < n; ++u)
                if (adj[v][u]) acc += wh[u][j] / std::sqrt(deg[v] * deg[u]);
            acc += wh[v][j];
            if (act == pyratext::Activation::relu && acc < 0.0) acc = 0.0;
            out.data()[v * dout + j] = acc;
        }
    }
    return out;
}

double oracle_binary_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
    double wins = 0.0;
    for (double p : pos)
        for (double q : neg) {
            if (p > q) wins += 1.0;
            else if (p == q) wins += 0.5;
        }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

OracleReport oracle_metrics(const std::vector<pyratext::EvalRecord>& records) {
    if (records.size() > kMaxRecords) throw TestScaleError("oracle_metrics: more than 10000 records");
    if (records.empty()) throw pyratext::ContractError("oracle_metrics: no records");
    const std::size_t c = records.front().probs.size();

    std::vector<std::size_t> pred(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < c; ++k)
            if (records[r].probs[k] > records[r].probs[best]) best = k;
        pred[r] = best;
    }

    // confusion[t][p] by a double loop over (true, predicted) cells.
    std::vector<std::vector<double>> confusion(c, std::vector<double>(c, 0.0));
    for (std::size_t t = 0; t < c; ++t)
        for (std::size_t p = 0; p < c; ++p)
            for (std::size_t r = 0; r < records.size(); ++r)
                if (records[r].true_label == t && pred[r] == p) confusion[t][p] += 1.0;

    OracleReport rep;
    double correct = 0.0;
    for (std::size_t k = 0; k < c; ++k) correct += confusion[k][k];
    rep.accuracy = correct / static_cast<double>(records.size());

    rep.precision.assign(c, 0.0);
    rep.recall.assign(c, 0.0);
    rep.f1.assign(c, 0.0);
    rep.auc.assign(c, 0.0);
    std::size_t present = 0, auc_classes = 0;
    for (std::size_t k = 0; k < c; ++k) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            row += confusion[k][j];
            col += confusion[j][k];
        }
        const double tp = confusion[k][k];
        rep.precision[k] = col > 0 ? tp / col : 0.0;
        rep.recall[k] = row > 0 ? tp / row : 0.0;
        const double s = rep.precision[k] + rep.recall[k];
        rep.f1[k] = s > 0 ? 2.0 * rep.precision[k] * rep.recall[k] / s : 0.0;
        if (row > 0) {
            ++present;
            rep.macro_precision += rep.precision[k];
            rep.macro_f1 += rep.f1[k];
        }

        std::vector<double> pos, neg;
        for (const auto& rec : records) (rec.true_label == k ? pos : neg).push_back(rec.probs[k]);
        if (!pos.empty() && !neg.empty()) {
            rep.auc[k] = oracle_binary_auc(pos, neg);
            rep.macro_ovr_auc += rep.auc[k];
            ++auc_classes;
        }
    }
    if (present < 2) throw pyratext::UndefinedMetricError("oracle_metrics: fewer than two classes present");
    rep.macro_precision /= static_cast<double>(present);
    rep.macro_f1 /= static_cast<double>(present);
    rep.macro_ovr_auc /= static_cast<double>(auc_classes);
    return rep;
}

} // namespace oracle

#include "pyratext/metrics.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/head.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace pyratext {

std::size_t check_records(std::span<const EvalRecord> records) {
    if (records.empty()) throw ContractError("metrics: no records");
    const std::size_t c = records.front().probs.size();
    if (c < 2) throw ContractError("metrics: need at least 2 classes");
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.probs.size() != c) throw ContractError("metrics: record " + std::to_string(i) + " has a different class count");
        if (r.true_label >= c) throw ContractError("metrics: record " + std::to_string(i) + " label out of range");
        double s = 0.0;
        for (double p : r.probs) {
            if (!(p >= 0.0)) throw ContractError("metrics: record " + std::to_string(i) + " has a negative or NaN prob");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-9)
            throw ContractError("metrics: record " + std::to_string(i) + " probs sum to " + std::to_string(s));
    }
    return c;
}

double accuracy(std::span<const EvalRecord> records) {
    check_records(records);
    std::size_t hits = 0;
    for (const auto& r : records) hits += argmax(r.probs) == r.true_label;
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

namespace {

std::vector<ClassStats> confusion_stats(std::span<const EvalRecord> records, std::size_t c) {
    std::vector<ClassStats> stats(c);
    for (const auto& r : records) {
        const std::size_t p = argmax(r.probs);
        ++stats[r.true_label].support;
        ++stats[p].predicted;
        if (p == r.true_label) ++stats[p].true_positive;
    }
    auto ratio = [](double a, double b) { return b == 0.0 ? 0.0 : a / b; };
    for (auto& s : stats) {
        s.precision = ratio(s.true_positive, s.predicted);
        s.recall = ratio(s.true_positive, s.support);
        s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
    }
    return stats;
}

PrecisionF1 macro_from(const std::vector<ClassStats>& stats) {
    PrecisionF1 out;
    std::size_t present = 0;
    for (const auto& s : stats) {
        if (s.support == 0) continue;
        out.precision += s.precision;
        out.f1 += s.f1;
        ++present;
    }
    out.precision /= static_cast<double>(present);
    out.f1 /= static_cast<double>(present);
    return out;
}

} // namespace

PrecisionF1 macro_precision_f1(std::span<const EvalRecord> records) {
    const std::size_t c = check_records(records);
    return macro_from(confusion_stats(records, c));
}

double binary_auc(std::span<const double> scores, std::span<const char> positive) {
    if (scores.size() != positive.size()) throw DimensionError("binary_auc: scores and labels differ in length");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks (1-based) summed over positives.
    double pos_rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t)
            if (positive[order[t]]) {
                pos_rank_sum += midrank;
                ++n_pos;
            }
        i = j + 1;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw UndefinedMetricError("binary_auc: need both positives and negatives");
    const double np = static_cast<double>(n_pos);
    const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

namespace {

// Per-class AUCs; entries for classes without both positives and negatives
// stay undefined.
void fill_auc(std::span<const EvalRecord> records, std::vector<ClassStats>& stats) {
    const std::size_t c = stats.size();
    std::vector<double> scores(records.size());
    std::vector<char> pos(records.size());
    for (std::size_t k = 0; k < c; ++k) {
        if (stats[k].support == 0 || stats[k].support == records.size()) continue;
        for (std::size_t i = 0; i < records.size(); ++i) {
            scores[i] = records[i].probs[k];
            pos[i] = records[i].true_label == k;
        }
        stats[k].auc = binary_auc(scores, pos);
        stats[k].auc_defined = true;
    }
}

double macro_auc_from(const std::vector<ClassStats>& stats) {
    std::size_t present = 0, defined = 0;
    double sum = 0.0;
    for (const auto& s : stats) {
        present += s.support > 0;
        if (s.auc_defined) {
            sum += s.auc;
            ++defined;
        }
    }
    if (present < 2 || defined == 0)
        throw UndefinedMetricError("macro_ovr_auc: undefined with fewer than two classes present");
    return sum / static_cast<double>(defined);
}

} // namespace

double macro_ovr_auc(std::span<const EvalRecord> records) {
    const std::size_t c = check_records(records);
    auto stats = confusion_stats(records, c);
    fill_auc(records, stats);
    return macro_auc_from(stats);
}

MetricReport evaluate_metrics(std::span<const EvalRecord> records) {
    const std::size_t c = check_records(records);
    MetricReport rep;
    rep.count = records.size();
    rep.per_class = confusion_stats(records, c);
    std::size_t hits = 0;
    for (const auto& s : rep.per_class) hits += s.true_positive;
    rep.accuracy = static_cast<double>(hits) / static_cast<double>(records.size());
    const auto pf = macro_from(rep.per_class);
    rep.macro_precision = pf.precision;
    rep.macro_f1 = pf.f1;
    fill_auc(records, rep.per_class);
    rep.macro_ovr_auc = macro_auc_from(rep.per_class);
    return rep;
}

std::string report_csv(const MetricReport& r) {
    std::string out = "metric,value,scheme\n";
    char buf[128];
    auto row = [&](const std::string& name, double v, const char* scheme) {
        std::snprintf(buf, sizeof buf, ",%.17g,%s\n", v, scheme);
        out += name + buf;
    };
    row("accuracy", r.accuracy, "micro");
    row("precision", r.macro_precision, "macro");
    row("f1", r.macro_f1, "macro");
    row("auc", r.macro_ovr_auc, "macro_ovr");
    row("count", static_cast<double>(r.count), "total");
    for (std::size_t k = 0; k < r.per_class.size(); ++k) {
        const auto& s = r.per_class[k];
        const std::string idx = "[" + std::to_string(k) + "]";
        row("precision" + idx, s.precision, "class");
        row("recall" + idx, s.recall, "class");
        row("f1" + idx, s.f1, "class");
        if (s.auc_defined) row("auc" + idx, s.auc, "class_ovr");
        row("support" + idx, static_cast<double>(s.support), "class");
    }
    return out;
}

} // namespace pyratext

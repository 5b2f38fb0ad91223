#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pyratext {

struct EvalRecord {
    std::size_t true_label = 0;
    std::vector<double> probs;
};

struct ClassStats {
    std::size_t support = 0;   // records whose true label is this class
    std::size_t predicted = 0; // records predicted as this class
    std::size_t true_positive = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
    bool auc_defined = false;
};

struct MetricReport {
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_f1 = 0.0;
    double macro_ovr_auc = 0.0;
    std::size_t count = 0;
    std::vector<ClassStats> per_class;
};

struct PrecisionF1 {
    double precision = 0.0;
    double f1 = 0.0;
};

/// Checks shape consistency, label range and that each prob vector sums to 1
/// within 1e-9. Returns the class count. Throws ContractError.
std::size_t check_records(std::span<const EvalRecord> records);

/// Fraction of records whose argmax (lowest index on ties) equals the label.
double accuracy(std::span<const EvalRecord> records);

/// Macro averages over the classes that occur as true labels. Per-class
/// precision, recall and F1 treat 0/0 as 0.
PrecisionF1 macro_precision_f1(std::span<const EvalRecord> records);

/// Rank-statistic AUC of `scores` with midranks for ties.
/// Requires at least one positive and one negative.
double binary_auc(std::span<const double> scores, std::span<const char> positive);

/// Mean one-vs-rest AUC over classes having both positives and negatives.
/// Throws UndefinedMetricError when fewer than two classes occur as labels.
double macro_ovr_auc(std::span<const EvalRecord> records);

MetricReport evaluate_metrics(std::span<const EvalRecord> records);

/// `metric,value,scheme` CSV: the four headline rows, then per-class rows.
std::string report_csv(const MetricReport& report);

} // namespace pyratext

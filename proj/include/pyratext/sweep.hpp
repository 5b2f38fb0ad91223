#pragma once

#include "pyratext/train.hpp"

#include <span>
#include <string>
#include <vector>

namespace pyratext {

struct SweepRow {
    double rate = 0.0;
    double auc = 0.0;
    double accuracy = 0.0;
    double final_train_loss = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::size_t best = 0; // row with the highest AUC (first on ties)
};

/// Independent train + eval per learning rate, all from the same seed and
/// data order. Needs at least two rates and a non-empty eval split. Up to
/// `max_threads` rates train concurrently; the report does not depend on it.
SweepReport lr_sweep(const TrainConfig& base, std::span<const double> rates, const DatasetSplit& train_split,
                     const DatasetSplit& eval_split, std::size_t max_threads = 1);

/// rate,auc,accuracy,final_train_loss,best
std::string sweep_csv(const SweepReport& report);

/// Line plot of AUC against log10(rate): one polyline, one marker per rate.
std::string sweep_svg(const SweepReport& report);

} // namespace pyratext

#pragma once

#include "pyratext/config.hpp"
#include "pyratext/dataset.hpp"
#include "pyratext/metrics.hpp"
#include "pyratext/model.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pyratext {

struct EpochRecord {
    std::size_t epoch = 0;    // 1-based
    double train_loss = 0.0;  // mean per-example loss seen during the epoch
    double train_accuracy = 0.0;
    std::optional<MetricReport> eval; // absent when the eval split is empty
    double seconds = 0.0;     // wall time; excluded from history_csv
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    /// Mean loss of every optimiser step, in order.
    std::vector<double> batch_losses;
};

struct TrainResult {
    Model model;
    TrainHistory history;
};

struct TrainHooks {
    /// Called after every epoch.
    std::function<void(const EpochRecord&)> on_epoch;
};

/// Mini-batch training of every parameter. Per epoch the example order is
/// reshuffled from a generator seeded by config.seed; each batch accumulates
/// per-example gradients of loss/B in index order before one optimiser step.
/// Throws NumericError on a non-finite loss.
TrainResult train(const TrainConfig& config, const DatasetSplit& train_split, const DatasetSplit& eval_split,
                  const TrainHooks& hooks = {});

/// Same, continuing from an existing model.
TrainHistory train_model(Model& model, const TrainConfig& config, const DatasetSplit& train_split,
                         const DatasetSplit& eval_split, const TrainHooks& hooks = {});

/// Mean cross-entropy over `examples` with a fresh tape per example; when
/// `accumulate` is set the gradients of loss/|examples| are added to params.
double batch_loss(const Model& model, std::span<const Example> examples, bool accumulate);

std::vector<EvalRecord> predict_records(const Model& model, const DatasetSplit& split);
MetricReport evaluate(const Model& model, const DatasetSplit& split);

/// epoch,train_loss,train_accuracy,eval_accuracy,eval_precision,eval_f1,eval_auc
std::string history_csv(const TrainHistory& history);

/// TrainConfig for a dataset: copies vocab size / class count into the model.
TrainConfig bind_to_data(TrainConfig config, const DatasetSplit& split);

} // namespace pyratext

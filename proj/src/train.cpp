#include "pyratext/train.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/optimizer.hpp"
#include "pyratext/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace pyratext {

TrainConfig bind_to_data(TrainConfig config, const DatasetSplit& split) {
    if (!split.vocab) throw ContractError("dataset has no vocabulary");
    config.model.encoder.vocab_size = split.vocab->size();
    config.model.num_classes = split.num_classes;
    return config;
}

double batch_loss(const Model& model, std::span<const Example> examples, bool accumulate) {
    if (examples.empty()) throw ContractError("batch_loss: empty batch");
    const double inv = 1.0 / static_cast<double>(examples.size());
    double total = 0.0;
    for (const auto& ex : examples) {
        Tape tape(accumulate);
        Tensor logits = model.logits(tape, ex.tokens);
        Tensor loss = ops::cross_entropy_logits(tape, logits, ex.label);
        total += loss.item();
        if (accumulate) tape.backward(ops::scale(tape, loss, inv));
    }
    return total * inv;
}

namespace {

void check_compatible(const Model& model, const DatasetSplit& split, const char* which) {
    if (split.examples.empty()) return;
    if (split.num_classes != model.config().num_classes)
        throw DataError(std::string(which) + " split has " + std::to_string(split.num_classes) +
                        " classes, model expects " + std::to_string(model.config().num_classes));
    if (split.vocab && split.vocab->size() != model.config().encoder.vocab_size)
        throw DataError(std::string(which) + " split vocabulary size differs from the model");
    for (const auto& ex : split.examples)
        if (ex.tokens.size() > model.config().encoder.max_len)
            throw DataError(std::string(which) + " split has a sequence longer than max_len");
}

} // namespace

TrainHistory train_model(Model& model, const TrainConfig& config, const DatasetSplit& train_split,
                         const DatasetSplit& eval_split, const TrainHooks& hooks) {
    config.validate(/*allow_zero_rate=*/true);
    if (train_split.examples.empty()) throw DataError("training split is empty");
    check_compatible(model, train_split, "train");
    check_compatible(model, eval_split, "eval");

    Optimizer opt(config.optimizer, config.learning_rate);
    Rng order_rng(config.seed ^ 0x5851f42d4c957f2dULL);
    std::vector<std::size_t> order(train_split.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainHistory history;
    const std::size_t bs = config.batch_size;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        order_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t hits = 0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += bs, ++batch_index) {
            const std::size_t end = std::min(order.size(), start + bs);
            const double inv = 1.0 / static_cast<double>(end - start);
            model.params().zero_grad();
            double batch_sum = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                const auto& ex = train_split.examples[order[i]];
                Tape tape;
                Tensor logits = model.logits(tape, ex.tokens);
                Tensor loss = ops::cross_entropy_logits(tape, logits, ex.label);
                const double lv = loss.item();
                if (!std::isfinite(lv)) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "non-finite loss: epoch=%zu batch=%zu example=%zu loss=%g", epoch,
                                  batch_index, order[i], lv);
                    throw NumericError(buf);
                }
                batch_sum += lv;
                hits += argmax(logits.data()) == ex.label;
                tape.backward(ops::scale(tape, loss, inv));
            }
            history.batch_losses.push_back(batch_sum * inv);
            loss_sum += batch_sum;
            opt.step(model.params());
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(order.size());
        rec.train_accuracy = static_cast<double>(hits) / static_cast<double>(order.size());
        if (!eval_split.examples.empty()) rec.eval = evaluate(model, eval_split);
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (hooks.on_epoch) hooks.on_epoch(rec);
        history.epochs.push_back(std::move(rec));
    }
    model.params().zero_grad();
    return history;
}

TrainResult train(const TrainConfig& config, const DatasetSplit& train_split, const DatasetSplit& eval_split,
                  const TrainHooks& hooks) {
    TrainConfig bound = bind_to_data(config, train_split);
    Model model = make_model(bound.model, bound.seed);
    TrainHistory history = train_model(model, bound, train_split, eval_split, hooks);
    return TrainResult{std::move(model), std::move(history)};
}

std::vector<EvalRecord> predict_records(const Model& model, const DatasetSplit& split) {
    std::vector<EvalRecord> out;
    out.reserve(split.size());
    for (const auto& ex : split.examples) out.push_back(EvalRecord{ex.label, model.predict(ex.tokens).probs});
    return out;
}

MetricReport evaluate(const Model& model, const DatasetSplit& split) {
    if (split.examples.empty()) throw DataError("evaluation split is empty");
    check_compatible(model, split, "eval");
    const auto records = predict_records(model, split);
    return evaluate_metrics(records);
}

std::string history_csv(const TrainHistory& history) {
    std::string out = "epoch,train_loss,train_accuracy,eval_accuracy,eval_precision,eval_f1,eval_auc\n";
    char buf[256];
    for (const auto& e : history.epochs) {
        if (e.eval)
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.train_loss,
                          e.train_accuracy, e.eval->accuracy, e.eval->macro_precision, e.eval->macro_f1,
                          e.eval->macro_ovr_auc);
        else
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,,,,\n", e.epoch, e.train_loss, e.train_accuracy);
        out += buf;
    }
    return out;
}

} // namespace pyratext

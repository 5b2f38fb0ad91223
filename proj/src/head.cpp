#include "pyratext/head.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/ops.hpp"

namespace pyratext {

ClassifierParams ClassifierParams::shaped(std::size_t input_dim, std::size_t num_classes) {
    if (num_classes < 2) throw ConfigError("classifier: need at least 2 classes");
    return ClassifierParams{Tensor::zeros({input_dim, num_classes}), Tensor::zeros({1, num_classes})};
}

void ClassifierParams::register_into(ParamSet& set, const std::string& prefix) const {
    set.add(prefix + "weight", weight);
    set.add(prefix + "bias", bias, ParamKind::bias);
}

std::size_t argmax(std::span<const double> values) {
    if (values.empty()) throw ContractError("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

Tensor readout(Tape& tape, const Tensor& node_states) {
    if (node_states.rank() != 2) throw DimensionError("readout: expected |V| x d node states");
    if (node_states.rows() == 0) throw ContractError("readout: empty node set");
    return ops::reshape(tape, ops::mean_axis(tape, node_states, 0), {1, node_states.cols()});
}

Tensor class_logits(Tape& tape, const Tensor& z, const ClassifierParams& params) {
    Tensor row = z.rank() == 1 ? ops::reshape(tape, z, {1, z.numel()}) : z;
    return ops::add_row(tape, ops::matmul(tape, row, params.weight), params.bias);
}

Prediction predict_from_logits(const Tensor& logits) {
    Tape off(false);
    Tensor p = ops::softmax_rows(off, logits);
    Prediction out;
    out.probs.assign(p.data().begin(), p.data().end());
    out.predicted_class = argmax(out.probs);
    return out;
}

Prediction classify(const Tensor& z, const ClassifierParams& params) {
    Tape off(false);
    return predict_from_logits(class_logits(off, z, params));
}

Tensor cross_entropy(Tape& tape, const Tensor& logits, std::size_t label) {
    return ops::cross_entropy_logits(tape, logits, label);
}

} // namespace pyratext

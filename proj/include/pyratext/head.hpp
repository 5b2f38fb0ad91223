#pragma once

#include "pyratext/params.hpp"
#include "pyratext/tape.hpp"
#include "pyratext/tensor.hpp"

#include <span>
#include <string>
#include <vector>

namespace pyratext {

struct ClassifierParams {
    Tensor weight; // d_K x C
    Tensor bias;   // 1 x C

    static ClassifierParams shaped(std::size_t input_dim, std::size_t num_classes);
    std::size_t num_classes() const { return bias.numel(); }
    void register_into(ParamSet& set, const std::string& prefix) const;
};

struct Prediction {
    std::vector<double> probs;
    std::size_t predicted_class = 0;
};

/// Index of the largest value; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

/// Mean over node rows: |V| x d -> 1 x d.
Tensor readout(Tape& tape, const Tensor& node_states);

/// z W_c + b_c, shape 1 x C.
Tensor class_logits(Tape& tape, const Tensor& z, const ClassifierParams& params);

/// softmax(z W_c + b_c) with argmax.
Prediction classify(const Tensor& z, const ClassifierParams& params);
Prediction predict_from_logits(const Tensor& logits);

/// -log softmax(logits)[label], fused through log-sum-exp.
Tensor cross_entropy(Tape& tape, const Tensor& logits, std::size_t label);

} // namespace pyratext

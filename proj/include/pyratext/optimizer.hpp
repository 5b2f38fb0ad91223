#pragma once

#include "pyratext/config.hpp"
#include "pyratext/params.hpp"

#include <vector>

namespace pyratext {

/// SGD or Adam over a ParamSet, reading the gradients already accumulated in
/// each parameter. State is indexed by registration order.
class Optimizer {
public:
    Optimizer(OptimizerConfig config, double learning_rate);

    void step(ParamSet& params);
    std::size_t steps() const { return t_; }
    double learning_rate() const { return lr_; }

private:
    OptimizerConfig config_;
    double lr_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

} // namespace pyratext

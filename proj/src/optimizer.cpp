#include "pyratext/optimizer.hpp"

#include <cmath>

namespace pyratext {

Optimizer::Optimizer(OptimizerConfig config, double learning_rate) : config_(config), lr_(learning_rate) {}

void Optimizer::step(ParamSet& params) {
    auto& items = params.items();
    ++t_;
    if (config_.kind == OptimizerKind::sgd) {
        for (auto& p : items) {
            if (!p.value.has_grad()) continue;
            auto data = p.value.data();
            const auto grad = p.value.grad();
            for (std::size_t i = 0; i < data.size(); ++i) data[i] -= lr_ * grad[i];
        }
        return;
    }

    if (m_.empty()) {
        m_.resize(items.size());
        v_.resize(items.size());
        for (std::size_t k = 0; k < items.size(); ++k) {
            m_[k].assign(items[k].value.numel(), 0.0);
            v_[k].assign(items[k].value.numel(), 0.0);
        }
    }
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t k = 0; k < items.size(); ++k) {
        auto& p = items[k].value;
        if (!p.has_grad()) continue;
        auto data = p.data();
        const auto grad = p.grad();
        auto& m = m_[k];
        auto& v = v_[k];
        for (std::size_t i = 0; i < data.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            data[i] -= lr_ * m_hat / (std::sqrt(v_hat) + config_.epsilon);
        }
    }
}

} // namespace pyratext

#pragma once

#include "pyratext/tensor.hpp"

#include <string>
#include <vector>

namespace pyratext {

/// Initialisation family of a parameter.
enum class ParamKind { weight, bias, embedding, gain };

struct NamedParam {
    std::string name;
    Tensor value;
    ParamKind kind = ParamKind::weight;
};

/// Ordered registry of trainable tensors. Registration order is the fixed
/// order used for initialisation draws, optimiser state and checkpoints.
class ParamSet {
public:
    void add(std::string name, Tensor value, ParamKind kind = ParamKind::weight);
    const std::vector<NamedParam>& items() const { return items_; }
    std::vector<NamedParam>& items() { return items_; }
    std::size_t size() const { return items_.size(); }
    std::size_t total_elements() const;
    /// Throws ContractError for an unknown name.
    Tensor find(const std::string& name) const;
    void zero_grad();

private:
    std::vector<NamedParam> items_;
};

} // namespace pyratext

#include "pyratext/params.hpp"

#include "pyratext/errors.hpp"

namespace pyratext {

void ParamSet::add(std::string name, Tensor value, ParamKind kind) {
    for (const auto& p : items_)
        if (p.name == name) throw ContractError("duplicate parameter name " + name);
    value.set_requires_grad(true);
    items_.push_back(NamedParam{std::move(name), std::move(value), kind});
}

std::size_t ParamSet::total_elements() const {
    std::size_t n = 0;
    for (const auto& p : items_) n += p.value.numel();
    return n;
}

Tensor ParamSet::find(const std::string& name) const {
    for (const auto& p : items_)
        if (p.name == name) return p.value;
    throw ContractError("no parameter named " + name);
}

void ParamSet::zero_grad() {
    for (auto& p : items_) p.value.zero_grad();
}

} // namespace pyratext

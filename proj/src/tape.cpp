#include "pyratext/tape.hpp"

#include "pyratext/errors.hpp"

#include <unordered_set>

namespace pyratext {

bool Tape::wants(std::initializer_list<const Tensor*> inputs) const {
    if (!recording_) return false;
    for (const Tensor* t : inputs)
        if (t->requires_grad()) return true;
    return false;
}

bool Tape::wants(std::span<const Tensor> inputs) const {
    if (!recording_) return false;
    for (const Tensor& t : inputs)
        if (t.requires_grad()) return true;
    return false;
}

void Tape::record(std::vector<Tensor> inputs, Tensor output, BackwardFn backward) {
    output.set_requires_grad(true);
    nodes_.push_back(Node{std::move(inputs), std::move(output), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
    if (loss.numel() != 1)
        throw ContractError("backward needs a scalar loss, got shape " + shape_str(loss.shape()));

    std::unordered_set<const void*> outputs;
    outputs.reserve(nodes_.size());
    for (auto& node : nodes_) outputs.insert(node.output.id());

    const bool on_tape = outputs.count(loss.id()) > 0;
    if (!on_tape && !loss.requires_grad())
        throw ContractError("loss is not reachable from the tape");

    for (auto& node : nodes_) {
        Tensor out = node.output;
        out.clear_grad();
        out.grad_mut();
    }
    for (auto& node : nodes_)
        for (auto& in : node.inputs)
            if (in.requires_grad()) in.grad_mut();

    Tensor seed = loss;
    seed.grad_mut()[0] += 1.0;

    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->backward(it->output.grad());
}

} // namespace pyratext

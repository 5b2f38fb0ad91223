#pragma once

#include "pyratext/tensor.hpp"

#include <functional>
#include <span>
#include <vector>

namespace pyratext {

/// Reverse-mode recorder.
///
/// Operations append a node whenever the tape is recording and at least one
/// input requires a gradient. Nodes are appended in execution order, so the
/// list is topological by construction and backward() replays it in reverse,
/// visiting each node once.
///
/// A tape is not thread-safe; independent tapes on separate threads are fine
/// as long as they don't write the same parameter gradients concurrently.
class Tape {
public:
    /// Receives the output gradient; accumulates into the captured inputs.
    using BackwardFn = std::function<void(std::span<const double> out_grad)>;

    explicit Tape(bool recording = true) : recording_(recording) {}

    bool recording() const { return recording_; }
    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

    /// True when an op over `inputs` must be recorded.
    bool wants(std::initializer_list<const Tensor*> inputs) const;
    bool wants(std::span<const Tensor> inputs) const;

    void record(std::vector<Tensor> inputs, Tensor output, BackwardFn backward);

    /// Populates grad of every requires_grad tensor reachable from `loss`.
    /// Leaf gradients accumulate across calls; intermediate gradients are
    /// reset on each call.
    void backward(const Tensor& loss);

private:
    struct Node {
        std::vector<Tensor> inputs;
        Tensor output;
        BackwardFn backward;
    };

    bool recording_;
    std::vector<Node> nodes_;
};

} // namespace pyratext

#pragma once

#include "pyratext/config.hpp"
#include "pyratext/encoder.hpp"
#include "pyratext/gnn.hpp"
#include "pyratext/graph.hpp"
#include "pyratext/head.hpp"
#include "pyratext/params.hpp"
#include "pyratext/pyramid.hpp"

#include <cstdint>
#include <map>
#include <span>

namespace pyratext {

/// Intermediate values of one forward pass.
struct ForwardTrace {
    LayerStates states;
    std::vector<PyramidLevel> levels;
    Tensor fused;
    TextGraph graph;
    Tensor node_states;
    Tensor document; // z, 1 x d_K
    Tensor logits;   // 1 x C
};

/// The full classifier: embed -> encode -> pyramid -> graph -> GNN ->
/// readout -> linear + softmax.
class Model {
public:
    /// Correctly shaped parameters; call init_params() before use.
    explicit Model(ModelConfig config);
    // Parameters are tensor handles, so a plain copy would alias them.
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;
    Model(Model&&) = default;
    Model& operator=(Model&&) = default;

    const ModelConfig& config() const { return config_; }
    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

    const EncoderParams& encoder() const { return encoder_; }
    const PyramidParams& pyramid() const { return pyramid_; }
    const GnnParams& gnn() const { return gnn_; }
    const ClassifierParams& head() const { return head_; }

    ForwardTrace forward(Tape& tape, std::span<const std::int64_t> ids) const;
    Tensor logits(Tape& tape, std::span<const std::int64_t> ids) const;
    Prediction predict(std::span<const std::int64_t> ids) const;

    /// Deep copy with independent parameter storage.
    Model clone() const;

private:
    TextGraph graph_for(const Tensor& fused) const;

    ModelConfig config_;
    EncoderParams encoder_;
    PyramidParams pyramid_;
    GnnParams gnn_;
    ClassifierParams head_;
    ParamSet params_;
    // Window topology depends only on (n, w); features are attached per call.
    mutable std::map<std::size_t, TextGraph> topology_cache_;
};

/// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases,
/// N(0, 0.02) embeddings and unit layer-norm gains, drawn from one generator
/// in registration order.
void init_params(ParamSet& params, std::uint64_t seed);

Model make_model(const ModelConfig& config, std::uint64_t seed);

} // namespace pyratext

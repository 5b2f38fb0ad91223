#include "pyratext/config.hpp"

#include "pyratext/errors.hpp"

#include <algorithm>

namespace pyratext {

using nlohmann::json;

void ModelConfig::validate() const {
    encoder.validate();
    if (pyramid_dim < 1) throw ConfigError("model.pyramid_dim must be >= 1");
    if (gnn_layers < 1) throw ConfigError("model.gnn_layers must be >= 1");
    if (gnn_dim < 1) throw ConfigError("model.gnn_dim must be >= 1");
    if (window < 2) throw ConfigError("model.window must be >= 2");
    if (knn && knn_k < 1) throw ConfigError("model.knn_k must be >= 1");
    if (num_classes < 2) throw ConfigError("num_classes must be >= 2");
}

void TrainConfig::validate(bool allow_zero_rate) const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate > 0.0) && !(allow_zero_rate && learning_rate == 0.0))
        throw ConfigError("learning_rate must be > 0");
    if (optimizer.kind == OptimizerKind::adam) {
        if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) || !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0))
            throw ConfigError("optimizer betas must be in [0, 1)");
        if (!(optimizer.epsilon > 0.0)) throw ConfigError("optimizer.epsilon must be > 0");
    }
    model.validate();
}

StrictObject::StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be a JSON object");
}

const json& StrictObject::child(const char* key) {
    seen_.push_back(key);
    return j_.at(key);
}

void StrictObject::finish() const {
    for (const auto& [key, value] : j_.items())
        if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
            throw ConfigError("unknown config key '" + (where_.empty() ? key : where_ + "." + key) + "'");
}

void StrictObject::fail_type(const char* key) const {
    throw ConfigError("config key '" + (where_.empty() ? std::string(key) : where_ + "." + key) +
                      "' has the wrong type");
}

json to_json(const TrainConfig& c, bool with_data_fields) {
    json model = {{"layers", c.model.encoder.layers},
                  {"dim", c.model.encoder.dim},
                  {"heads", c.model.encoder.heads},
                  {"ffn_dim", c.model.encoder.ffn_dim},
                  {"max_len", c.model.encoder.max_len},
                  {"pyramid_dim", c.model.pyramid_dim},
                  {"gnn_layers", c.model.gnn_layers},
                  {"gnn_dim", c.model.gnn_dim},
                  {"window", c.model.window},
                  {"knn", c.model.knn},
                  {"knn_k", c.model.knn_k}};
    if (with_data_fields) {
        model["vocab_size"] = c.model.encoder.vocab_size;
        model["num_classes"] = c.model.num_classes;
    }
    json opt = {{"kind", c.optimizer.kind == OptimizerKind::adam ? "adam" : "sgd"},
                {"beta1", c.optimizer.beta1},
                {"beta2", c.optimizer.beta2},
                {"epsilon", c.optimizer.epsilon}};
    return json{{"seed", c.seed},
                {"epochs", c.epochs},
                {"batch_size", c.batch_size},
                {"learning_rate", c.learning_rate},
                {"optimizer", opt},
                {"model", model}};
}

TrainConfig train_config_from_json(const json& j, bool with_data_fields, const std::vector<std::string>& extra_top_keys) {
    TrainConfig c;
    StrictObject top(j, "");
    for (const auto& k : extra_top_keys) top.allow(k);
    top.get("seed", c.seed);
    top.get("epochs", c.epochs);
    top.get("batch_size", c.batch_size);
    top.get("learning_rate", c.learning_rate);
    if (top.has("optimizer")) {
        StrictObject o(top.child("optimizer"), "optimizer");
        std::string kind = "adam";
        o.get("kind", kind);
        if (kind == "adam") c.optimizer.kind = OptimizerKind::adam;
        else if (kind == "sgd") c.optimizer.kind = OptimizerKind::sgd;
        else throw ConfigError("optimizer.kind must be 'adam' or 'sgd', got '" + kind + "'");
        o.get("beta1", c.optimizer.beta1);
        o.get("beta2", c.optimizer.beta2);
        o.get("epsilon", c.optimizer.epsilon);
        o.finish();
    }
    if (top.has("model")) {
        StrictObject m(top.child("model"), "model");
        m.get("layers", c.model.encoder.layers);
        m.get("dim", c.model.encoder.dim);
        m.get("heads", c.model.encoder.heads);
        m.get("ffn_dim", c.model.encoder.ffn_dim);
        m.get("max_len", c.model.encoder.max_len);
        m.get("pyramid_dim", c.model.pyramid_dim);
        m.get("gnn_layers", c.model.gnn_layers);
        m.get("gnn_dim", c.model.gnn_dim);
        m.get("window", c.model.window);
        m.get("knn", c.model.knn);
        m.get("knn_k", c.model.knn_k);
        if (with_data_fields) {
            m.get("vocab_size", c.model.encoder.vocab_size);
            m.get("num_classes", c.model.num_classes);
        }
        m.finish();
    }
    top.finish();
    return c;
}

} // namespace pyratext

#pragma once

#include "pyratext/encoder.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pyratext {

struct ModelConfig {
    EncoderConfig encoder;
    std::size_t pyramid_dim = 64; // d_p
    std::size_t gnn_layers = 2;   // K
    std::size_t gnn_dim = 64;
    std::size_t window = 3;
    bool knn = false;
    std::size_t knn_k = 2;
    std::size_t num_classes = 4;

    void validate() const;
};

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainConfig {
    std::uint64_t seed = 1;
    std::size_t epochs = 15;
    std::size_t batch_size = 8;
    double learning_rate = 1e-4;
    OptimizerConfig optimizer;
    ModelConfig model;

    /// Rejects learning_rate <= 0 unless `allow_zero_rate` (the degenerate
    /// no-update run used in tests).
    void validate(bool allow_zero_rate = false) const;
};

// Strict JSON mapping: unknown keys raise ConfigError naming the key; absent
// keys keep their defaults. vocab_size and num_classes come from the data and
// are not part of the user-facing document unless `with_data_fields`.
nlohmann::json to_json(const TrainConfig& config, bool with_data_fields = true);
/// `extra_top_keys` are tolerated at the top level (the CLI document adds its
/// own sections next to the training fields).
TrainConfig train_config_from_json(const nlohmann::json& j, bool with_data_fields = true,
                                   const std::vector<std::string>& extra_top_keys = {});

/// Tracks which keys of an object were read so leftovers can be rejected.
class StrictObject {
public:
    StrictObject(const nlohmann::json& j, std::string where);

    template <typename T>
    void get(const char* key, T& out) {
        seen_.push_back(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            fail_type(key);
        }
    }
    bool has(const char* key) const { return j_.contains(key); }
    void allow(const std::string& key) { seen_.push_back(key); }
    const nlohmann::json& child(const char* key);
    void finish() const;

private:
    [[noreturn]] void fail_type(const char* key) const;
    const nlohmann::json& j_;
    std::string where_;
    std::vector<std::string> seen_;
};

} // namespace pyratext

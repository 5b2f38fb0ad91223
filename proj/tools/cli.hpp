#pragma once

#include "pyratext/config.hpp"
#include "pyratext/dataset.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pyratext::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kDataError = 2;
inline constexpr int kNumericError = 3;
inline constexpr int kInternalError = 4;

enum class DataKind { synthetic, agnews };

struct DataSpec {
    DataKind kind = DataKind::synthetic;
    SyntheticSpec synthetic;
    std::size_t eval_per_class = 50; // synthetic only
    AgNewsSpec agnews;
};

/// The config file: every TrainConfig key at the top level plus a "data"
/// section, e.g. {"data": {"kind": "agnews", "train": "...", "test": "..."}}.
struct RunConfig {
    TrainConfig train;
    DataSpec data;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Both splits, bound to the config's vocabulary and class count.
SplitPair load_data(const DataSpec& spec, std::size_t max_len);

/// Entry point; `args` excludes the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pyratext::cli

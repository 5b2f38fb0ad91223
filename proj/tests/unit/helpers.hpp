#pragma once

#include "pyratext/rng.hpp"
#include "pyratext/tensor.hpp"

#include <filesystem>
#include <string>

namespace test {

inline pyratext::Tensor random_tensor(pyratext::Rng& rng, pyratext::Shape shape, double lo = -2.0, double hi = 2.0,
                                      bool grad = false) {
    auto t = pyratext::Tensor::zeros(std::move(shape), grad);
    for (auto& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("pyratext_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace test

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pyratext {

/// Seeded generator with distribution transforms defined here rather than by
/// the standard library, whose distributions are implementation-specific.
/// mt19937_64's output sequence is fixed by the standard, so the same seed
/// yields the same draws on every toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Box-Muller; one draw per call (the partner value is discarded).
    double normal(double mean, double stddev);
    /// Uniform integer in [0, bound) by rejection sampling.
    std::uint64_t below(std::uint64_t bound);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace pyratext

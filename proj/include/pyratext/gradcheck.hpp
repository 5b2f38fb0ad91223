#pragma once

#include "pyratext/config.hpp"
#include "pyratext/tape.hpp"
#include "pyratext/tensor.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pyratext {

enum class GradScope { op, module, endtoend, all };

std::optional<GradScope> parse_grad_scope(const std::string& s);
const char* scope_name(GradScope s);

struct GradCheckResult {
    std::string name;
    GradScope scope = GradScope::op;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    std::size_t checked = 0; // coordinates compared
    double seconds = 0.0;

    bool passed() const { return max_rel_error < tolerance; }
};

/// |a - f| / max(1, |a| + |f|)
double grad_relative_error(double analytic, double numeric);

using LossFn = std::function<Tensor(Tape&)>;

/// Compares the tape gradient of `loss` w.r.t. every element of `inputs`
/// against central differences with step `h`. Each input must have
/// requires_grad set; existing gradients are cleared.
GradCheckResult check_gradients(std::string name, std::vector<Tensor> inputs, const LossFn& loss, double tolerance,
                                double h = 1e-5);

struct GradCheckCase {
    std::string name;
    GradScope scope;
    std::function<GradCheckResult()> run;
};

/// Reduced end-to-end configuration: L=2, d=8, two heads, d_p=8, K=2, C=3,
/// vocabulary of 10 and max_len 3.
ModelConfig reduced_model_config();

/// Every built-in check, tagged by scope.
std::vector<GradCheckCase> builtin_gradchecks();

/// A relu whose backward rule ignores the sign of the input. Exists so the
/// harness can be shown to catch a broken rule.
GradCheckCase faulty_relu_case();

std::vector<GradCheckResult> run_gradchecks(GradScope scope, std::span<const GradCheckCase> extra = {});

/// Fixed-width pass/fail table, one row per check.
std::string format_gradcheck_table(std::span<const GradCheckResult> results);

} // namespace pyratext

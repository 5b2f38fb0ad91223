#pragma once

#include "pyratext/tape.hpp"
#include "pyratext/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

// Differentiable tensor operations. Every op takes the tape explicitly and
// records itself only when some input requires a gradient. Reductions run in
// a fixed sequential order so results are bit-reproducible.
namespace pyratext::ops {

// Linear algebra
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor transpose(Tape& tape, const Tensor& x);

// Elementwise
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& x, double factor);
/// Subgradient at exactly 0 is 0.
Tensor relu(Tape& tape, const Tensor& x);

// Row broadcasts: x is m×n, row is 1×n (or n).
Tensor add_row(Tape& tape, const Tensor& x, const Tensor& row);
Tensor mul_row(Tape& tape, const Tensor& x, const Tensor& row);

/// Per-row softmax with max subtraction.
Tensor softmax_rows(Tape& tape, const Tensor& x);

/// Per-row standardisation (zero mean, unit variance); no affine terms.
Tensor normalize_rows(Tape& tape, const Tensor& x, double eps);

// Reductions. The reduced axis is removed, except that a rank-1 input
// reduces to shape (1).
Tensor sum_axis(Tape& tape, const Tensor& x, std::size_t axis);
Tensor mean_axis(Tape& tape, const Tensor& x, std::size_t axis);
/// Sum of all elements, shape (1).
Tensor sum(Tape& tape, const Tensor& x);

/// Same data, new shape of equal element count.
Tensor reshape(Tape& tape, const Tensor& x, Shape shape);

/// Concatenate along the last axis; all other extents must agree.
Tensor concat_last(Tape& tape, std::span<const Tensor> parts);
/// Columns [start, start+len) of the last axis.
Tensor slice_last(Tape& tape, const Tensor& x, std::size_t start, std::size_t len);

/// Gather rows of a 2-D table.
Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const std::int64_t> ids);

/// Non-overlapping mean pooling along rows with window `s`; the final partial
/// window averages over its actual length.
Tensor pool_rows(Tape& tape, const Tensor& x, std::size_t s);
/// Nearest-neighbour row repetition: output row i = input row i / s, for
/// i < target_rows. Requires rows(x) == ceil(target_rows / s).
Tensor repeat_rows(Tape& tape, const Tensor& x, std::size_t s, std::size_t target_rows);

/// -log softmax(logits)[label] for a single logit row, via log-sum-exp.
Tensor cross_entropy_logits(Tape& tape, const Tensor& logits, std::size_t label);

} // namespace pyratext::ops

namespace pyratext {

/// Nonlinearity selector. `identity` exists as a test hook for oracle checks.
enum class Activation { relu, identity };

Tensor activate(Tape& tape, const Tensor& x, Activation act);

} // namespace pyratext

#include "pyratext/ops.hpp"

#include "pyratext/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pyratext::ops {

namespace {

void require_matrix(const Tensor& t, const char* op) {
    if (t.rank() != 2)
        throw DimensionError(std::string(op) + ": expected a matrix, got shape " + shape_str(t.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
}

// Splits a shape around `axis` into (outer, extent, inner) for strided loops.
struct AxisSplit {
    std::size_t outer = 1, extent = 1, inner = 1;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis) {
    AxisSplit s;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i < axis) s.outer *= shape[i];
        else if (i == axis) s.extent = shape[i];
        else s.inner *= shape[i];
    }
    return s;
}

Shape drop_axis(const Shape& shape, std::size_t axis) {
    Shape out;
    for (std::size_t i = 0; i < shape.size(); ++i)
        if (i != axis) out.push_back(shape[i]);
    if (out.empty()) out.push_back(1);
    return out;
}

std::size_t row_width(const Tensor& row) {
    if (row.rank() == 1) return row.dim(0);
    if (row.rank() == 2 && row.dim(0) == 1) return row.dim(1);
    throw DimensionError("row operand must be (n) or (1xn), got " + shape_str(row.shape()));
}

} // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
    require_matrix(a, "matmul");
    require_matrix(b, "matmul");
    const std::size_t m = a.rows(), k = a.cols(), p = b.cols();
    if (b.rows() != k)
        throw DimensionError("matmul: inner dimensions disagree for " + shape_str(a.shape()) + " x " +
                             shape_str(b.shape()));
    Tensor c = Tensor::zeros({m, p});
    {
        const double* A = a.data().data();
        const double* B = b.data().data();
        double* C = c.data().data();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t t = 0; t < k; ++t) {
                const double av = A[i * k + t];
                const double* brow = B + t * p;
                double* crow = C + i * p;
                for (std::size_t j = 0; j < p; ++j) crow[j] += av * brow[j];
            }
    }
    if (tape.wants({&a, &b})) {
        tape.record({a, b}, c, [a, b, m, k, p](std::span<const double> dC) mutable {
            const double* A = a.data().data();
            const double* B = b.data().data();
            if (a.requires_grad()) {
                double* dA = a.grad_mut().data();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t t = 0; t < k; ++t) {
                        double s = 0.0;
                        const double* drow = dC.data() + i * p;
                        const double* brow = B + t * p;
                        for (std::size_t j = 0; j < p; ++j) s += drow[j] * brow[j];
                        dA[i * k + t] += s;
                    }
            }
            if (b.requires_grad()) {
                double* dB = b.grad_mut().data();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t t = 0; t < k; ++t) {
                        const double av = A[i * k + t];
                        const double* drow = dC.data() + i * p;
                        double* dbrow = dB + t * p;
                        for (std::size_t j = 0; j < p; ++j) dbrow[j] += av * drow[j];
                    }
            }
        });
    }
    return c;
}

Tensor transpose(Tape& tape, const Tensor& x) {
    require_matrix(x, "transpose");
    const std::size_t m = x.rows(), n = x.cols();
    Tensor y = Tensor::zeros({n, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) y[j * m + i] = x[i * n + j];
    if (tape.wants({&x})) {
        tape.record({x}, y, [x, m, n](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) g[i * n + j] += dy[j * m + i];
        });
    }
    return y;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor c = Tensor::zeros(a.shape());
    for (std::size_t i = 0; i < c.numel(); ++i) c[i] = a[i] + b[i];
    if (tape.wants({&a, &b})) {
        tape.record({a, b}, c, [a, b](std::span<const double> dc) mutable {
            if (a.requires_grad()) {
                auto g = a.grad_mut();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += dc[i];
            }
            if (b.requires_grad()) {
                auto g = b.grad_mut();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += dc[i];
            }
        });
    }
    return c;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor c = Tensor::zeros(a.shape());
    for (std::size_t i = 0; i < c.numel(); ++i) c[i] = a[i] * b[i];
    if (tape.wants({&a, &b})) {
        tape.record({a, b}, c, [a, b](std::span<const double> dc) mutable {
            if (a.requires_grad()) {
                auto g = a.grad_mut();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += dc[i] * b[i];
            }
            if (b.requires_grad()) {
                auto g = b.grad_mut();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += dc[i] * a[i];
            }
        });
    }
    return c;
}

Tensor scale(Tape& tape, const Tensor& x, double factor) {
    Tensor y = Tensor::zeros(x.shape());
    for (std::size_t i = 0; i < y.numel(); ++i) y[i] = x[i] * factor;
    if (tape.wants({&x})) {
        tape.record({x}, y, [x, factor](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i] * factor;
        });
    }
    return y;
}

Tensor relu(Tape& tape, const Tensor& x) {
    Tensor y = Tensor::zeros(x.shape());
    for (std::size_t i = 0; i < y.numel(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
    if (tape.wants({&x})) {
        tape.record({x}, y, [x](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (std::size_t i = 0; i < g.size(); ++i)
                if (x[i] > 0.0) g[i] += dy[i];
        });
    }
    return y;
}

Tensor add_row(Tape& tape, const Tensor& x, const Tensor& row) {
    require_matrix(x, "add_row");
    const std::size_t m = x.rows(), n = x.cols();
    if (row_width(row) != n)
        throw DimensionError("add_row: " + shape_str(x.shape()) + " vs row " + shape_str(row.shape()));
    Tensor y = Tensor::zeros({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i * n + j] = x[i * n + j] + row[j];
    if (tape.wants({&x, &row})) {
        tape.record({x, row}, y, [x, row, m, n](std::span<const double> dy) mutable {
            if (x.requires_grad()) {
                auto g = x.grad_mut();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i];
            }
            if (row.requires_grad()) {
                auto g = row.grad_mut();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) g[j] += dy[i * n + j];
            }
        });
    }
    return y;
}

Tensor mul_row(Tape& tape, const Tensor& x, const Tensor& row) {
    require_matrix(x, "mul_row");
    const std::size_t m = x.rows(), n = x.cols();
    if (row_width(row) != n)
        throw DimensionError("mul_row: " + shape_str(x.shape()) + " vs row " + shape_str(row.shape()));
    Tensor y = Tensor::zeros({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i * n + j] = x[i * n + j] * row[j];
    if (tape.wants({&x, &row})) {
        tape.record({x, row}, y, [x, row, m, n](std::span<const double> dy) mutable {
            if (x.requires_grad()) {
                auto g = x.grad_mut();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) g[i * n + j] += dy[i * n + j] * row[j];
            }
            if (row.requires_grad()) {
                auto g = row.grad_mut();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) g[j] += dy[i * n + j] * x[i * n + j];
            }
        });
    }
    return y;
}

Tensor softmax_rows(Tape& tape, const Tensor& x) {
    const std::size_t c = x.shape().back();
    const std::size_t m = x.numel() / c;
    Tensor y = Tensor::zeros(x.shape());
    for (std::size_t i = 0; i < m; ++i) {
        const double* in = x.data().data() + i * c;
        double* out = y.data().data() + i * c;
        const double mx = *std::max_element(in, in + c);
        double s = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            out[j] = std::exp(in[j] - mx);
            s += out[j];
        }
        for (std::size_t j = 0; j < c; ++j) out[j] /= s;
    }
    if (tape.wants({&x})) {
        tape.record({x}, y, [x, y, m, c](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (std::size_t i = 0; i < m; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < c; ++j) dot += dy[i * c + j] * y[i * c + j];
                for (std::size_t j = 0; j < c; ++j) g[i * c + j] += y[i * c + j] * (dy[i * c + j] - dot);
            }
        });
    }
    return y;
}

Tensor normalize_rows(Tape& tape, const Tensor& x, double eps) {
    require_matrix(x, "normalize_rows");
    const std::size_t m = x.rows(), n = x.cols();
    Tensor y = Tensor::zeros({m, n});
    std::vector<double> inv_std(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* in = x.data().data() + i * n;
        double mu = 0.0;
        for (std::size_t j = 0; j < n; ++j) mu += in[j];
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) var += (in[j] - mu) * (in[j] - mu);
        var /= static_cast<double>(n);
        inv_std[i] = 1.0 / std::sqrt(var + eps);
        for (std::size_t j = 0; j < n; ++j) y[i * n + j] = (in[j] - mu) * inv_std[i];
    }
    if (tape.wants({&x})) {
        tape.record({x}, y, [x, y, inv_std, m, n](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            const double inv_n = 1.0 / static_cast<double>(n);
            for (std::size_t i = 0; i < m; ++i) {
                double mean_dy = 0.0, mean_dyy = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    mean_dy += dy[i * n + j];
                    mean_dyy += dy[i * n + j] * y[i * n + j];
                }
                mean_dy *= inv_n;
                mean_dyy *= inv_n;
                for (std::size_t j = 0; j < n; ++j)
                    g[i * n + j] += inv_std[i] * (dy[i * n + j] - mean_dy - y[i * n + j] * mean_dyy);
            }
        });
    }
    return y;
}

Tensor sum_axis(Tape& tape, const Tensor& x, std::size_t axis) {
    if (axis >= x.rank())
        throw DimensionError("sum_axis: axis " + std::to_string(axis) + " invalid for shape " +
                             shape_str(x.shape()));
    const auto s = split_axis(x.shape(), axis);
    Tensor y = Tensor::zeros(drop_axis(x.shape(), axis));
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t e = 0; e < s.extent; ++e)
            for (std::size_t i = 0; i < s.inner; ++i)
                y[o * s.inner + i] += x[(o * s.extent + e) * s.inner + i];
    if (tape.wants({&x})) {
        tape.record({x}, y, [x, s](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (std::size_t o = 0; o < s.outer; ++o)
                for (std::size_t e = 0; e < s.extent; ++e)
                    for (std::size_t i = 0; i < s.inner; ++i)
                        g[(o * s.extent + e) * s.inner + i] += dy[o * s.inner + i];
        });
    }
    return y;
}

Tensor mean_axis(Tape& tape, const Tensor& x, std::size_t axis) {
    if (axis >= x.rank())
        throw DimensionError("mean_axis: axis " + std::to_string(axis) + " invalid for shape " +
                             shape_str(x.shape()));
    return scale(tape, sum_axis(tape, x, axis), 1.0 / static_cast<double>(x.dim(axis)));
}

Tensor sum(Tape& tape, const Tensor& x) {
    Tensor y = Tensor::scalar(0.0);
    double s = 0.0;
    for (double v : x.data()) s += v;
    y[0] = s;
    if (tape.wants({&x})) {
        tape.record({x}, y, [x](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (auto& v : g) v += dy[0];
        });
    }
    return y;
}

Tensor reshape(Tape& tape, const Tensor& x, Shape shape) {
    if (shape_numel(shape) != x.numel())
        throw DimensionError("reshape: " + shape_str(x.shape()) + " to " + shape_str(shape));
    Tensor y(std::move(shape), std::vector<double>(x.data().begin(), x.data().end()));
    if (tape.wants({&x})) {
        tape.record({x}, y, [x](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i];
        });
    }
    return y;
}

Tensor concat_last(Tape& tape, std::span<const Tensor> parts) {
    if (parts.empty()) throw ContractError("concat_last: no operands");
    const Shape& ref = parts.front().shape();
    std::size_t width = 0;
    for (const auto& p : parts) {
        if (p.rank() != ref.size() ||
            !std::equal(ref.begin(), ref.end() - 1, p.shape().begin()))
            throw DimensionError("concat_last: " + shape_str(ref) + " vs " + shape_str(p.shape()));
        width += p.shape().back();
    }
    Shape out_shape = ref;
    out_shape.back() = width;
    const std::size_t outer = shape_numel(ref) / ref.back();
    Tensor y = Tensor::zeros(out_shape);
    std::size_t offset = 0;
    for (const auto& p : parts) {
        const std::size_t w = p.shape().back();
        for (std::size_t o = 0; o < outer; ++o)
            std::copy_n(p.data().data() + o * w, w, y.data().data() + o * width + offset);
        offset += w;
    }
    if (tape.wants(parts)) {
        std::vector<Tensor> inputs(parts.begin(), parts.end());
        tape.record(inputs, y, [inputs, outer, width](std::span<const double> dy) mutable {
            std::size_t off = 0;
            for (auto& p : inputs) {
                const std::size_t w = p.shape().back();
                if (p.requires_grad()) {
                    auto g = p.grad_mut();
                    for (std::size_t o = 0; o < outer; ++o)
                        for (std::size_t j = 0; j < w; ++j) g[o * w + j] += dy[o * width + off + j];
                }
                off += w;
            }
        });
    }
    return y;
}

Tensor slice_last(Tape& tape, const Tensor& x, std::size_t start, std::size_t len) {
    const std::size_t width = x.shape().back();
    if (len == 0 || start + len > width)
        throw DimensionError("slice_last: [" + std::to_string(start) + ", " + std::to_string(start + len) +
                             ") outside " + shape_str(x.shape()));
    Shape out_shape = x.shape();
    out_shape.back() = len;
    const std::size_t outer = x.numel() / width;
    Tensor y = Tensor::zeros(out_shape);
    for (std::size_t o = 0; o < outer; ++o)
        std::copy_n(x.data().data() + o * width + start, len, y.data().data() + o * len);
    if (tape.wants({&x})) {
        tape.record({x}, y, [x, outer, width, start, len](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (std::size_t o = 0; o < outer; ++o)
                for (std::size_t j = 0; j < len; ++j) g[o * width + start + j] += dy[o * len + j];
        });
    }
    return y;
}

Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const std::int64_t> ids) {
    require_matrix(table, "gather_rows");
    if (ids.empty()) throw ContractError("gather_rows: empty id list");
    const std::size_t vocab = table.rows(), d = table.cols();
    for (auto id : ids)
        if (id < 0 || static_cast<std::size_t>(id) >= vocab)
            throw ContractError("gather_rows: id " + std::to_string(id) + " outside table of " +
                                std::to_string(vocab) + " rows");
    Tensor y = Tensor::zeros({ids.size(), d});
    for (std::size_t i = 0; i < ids.size(); ++i)
        std::copy_n(table.data().data() + static_cast<std::size_t>(ids[i]) * d, d, y.data().data() + i * d);
    if (tape.wants({&table})) {
        std::vector<std::int64_t> kept(ids.begin(), ids.end());
        tape.record({table}, y, [table, kept, d](std::span<const double> dy) mutable {
            auto g = table.grad_mut();
            for (std::size_t i = 0; i < kept.size(); ++i)
                for (std::size_t j = 0; j < d; ++j) g[static_cast<std::size_t>(kept[i]) * d + j] += dy[i * d + j];
        });
    }
    return y;
}

Tensor pool_rows(Tape& tape, const Tensor& x, std::size_t s) {
    require_matrix(x, "pool_rows");
    if (s == 0) throw ContractError("pool_rows: window must be >= 1");
    const std::size_t n = x.rows(), d = x.cols();
    const std::size_t out_rows = (n + s - 1) / s;
    Tensor y = Tensor::zeros({out_rows, d});
    for (std::size_t r = 0; r < out_rows; ++r) {
        const std::size_t lo = r * s, hi = std::min(n, lo + s);
        const double inv = 1.0 / static_cast<double>(hi - lo);
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = 0; j < d; ++j) y[r * d + j] += x[i * d + j];
        for (std::size_t j = 0; j < d; ++j) y[r * d + j] *= inv;
    }
    if (tape.wants({&x})) {
        tape.record({x}, y, [x, s, n, d, out_rows](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (std::size_t r = 0; r < out_rows; ++r) {
                const std::size_t lo = r * s, hi = std::min(n, lo + s);
                const double inv = 1.0 / static_cast<double>(hi - lo);
                for (std::size_t i = lo; i < hi; ++i)
                    for (std::size_t j = 0; j < d; ++j) g[i * d + j] += dy[r * d + j] * inv;
            }
        });
    }
    return y;
}

Tensor repeat_rows(Tape& tape, const Tensor& x, std::size_t s, std::size_t target_rows) {
    require_matrix(x, "repeat_rows");
    if (s == 0 || target_rows == 0) throw ContractError("repeat_rows: factor and target must be >= 1");
    const std::size_t m = x.rows(), d = x.cols();
    if (m != (target_rows + s - 1) / s)
        throw DimensionError("repeat_rows: " + std::to_string(m) + " rows cannot expand to " +
                             std::to_string(target_rows) + " with factor " + std::to_string(s));
    Tensor y = Tensor::zeros({target_rows, d});
    for (std::size_t i = 0; i < target_rows; ++i)
        std::copy_n(x.data().data() + (i / s) * d, d, y.data().data() + i * d);
    if (tape.wants({&x})) {
        tape.record({x}, y, [x, s, d, target_rows](std::span<const double> dy) mutable {
            auto g = x.grad_mut();
            for (std::size_t i = 0; i < target_rows; ++i)
                for (std::size_t j = 0; j < d; ++j) g[(i / s) * d + j] += dy[i * d + j];
        });
    }
    return y;
}

Tensor cross_entropy_logits(Tape& tape, const Tensor& logits, std::size_t label) {
    const std::size_t c = logits.numel();
    if (logits.rank() == 2 && logits.dim(0) != 1)
        throw DimensionError("cross_entropy_logits: expected one logit row, got " + shape_str(logits.shape()));
    if (label >= c)
        throw ContractError("cross_entropy_logits: label " + std::to_string(label) + " outside " +
                            std::to_string(c) + " classes");
    const auto z = logits.data();
    const double mx = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    Tensor loss = Tensor::scalar(lse - z[label]);
    if (tape.wants({&logits})) {
        tape.record({logits}, loss, [logits, label, lse, c](std::span<const double> dl) mutable {
            auto g = logits.grad_mut();
            for (std::size_t j = 0; j < c; ++j) {
                const double p = std::exp(logits[j] - lse);
                g[j] += dl[0] * (p - (j == label ? 1.0 : 0.0));
            }
        });
    }
    return loss;
}

} // namespace pyratext::ops

namespace pyratext {

Tensor activate(Tape& tape, const Tensor& x, Activation act) {
    return act == Activation::relu ? ops::relu(tape, x) : x;
}

} // namespace pyratext

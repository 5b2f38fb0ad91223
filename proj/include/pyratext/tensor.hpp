#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pyratext {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

namespace detail {
struct TensorStorage {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad; // empty == absent
    bool requires_grad = false;
};
} // namespace detail

/// Dense row-major float64 array of rank 1..3.
///
/// A Tensor is a handle: copies alias the same storage, which is what lets the
/// tape find a parameter again when it propagates gradients. Use clone() for
/// an independent copy.
class Tensor {
public:
    Tensor();
    Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor filled(Shape shape, double value, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);
    /// 2-D convenience constructor from nested rows.
    static Tensor matrix(const std::vector<std::vector<double>>& rows, bool requires_grad = false);

    const Shape& shape() const { return impl_->shape; }
    std::size_t rank() const { return impl_->shape.size(); }
    std::size_t numel() const { return impl_->data.size(); }
    std::size_t dim(std::size_t axis) const;
    // Leading / trailing extents of a rank-2 tensor.
    std::size_t rows() const;
    std::size_t cols() const;

    std::span<double> data() { return impl_->data; }
    std::span<const double> data() const { return impl_->data; }
    double& operator[](std::size_t i) { return impl_->data[i]; }
    double operator[](std::size_t i) const { return impl_->data[i]; }
    double& at(std::size_t r, std::size_t c);
    double at(std::size_t r, std::size_t c) const;
    /// Value of a single-element tensor.
    double item() const;

    bool requires_grad() const { return impl_->requires_grad; }
    void set_requires_grad(bool on) { impl_->requires_grad = on; }

    bool has_grad() const { return !impl_->grad.empty(); }
    std::span<const double> grad() const { return impl_->grad; }
    /// Gradient buffer, allocated as zeros on first access. Const because the
    /// buffer belongs to the shared storage, not to this handle.
    std::span<double> grad_mut() const;
    void zero_grad();
    void clear_grad() { impl_->grad.clear(); }

    Tensor clone() const;
    /// Same storage? (identity, not value equality)
    bool same(const Tensor& other) const { return impl_ == other.impl_; }
    const void* id() const { return impl_.get(); }

private:
    std::shared_ptr<detail::TensorStorage> impl_;
};

bool all_finite(const Tensor& t);
double max_abs_diff(const Tensor& a, const Tensor& b);
double frobenius_norm(const Tensor& t);

} // namespace pyratext

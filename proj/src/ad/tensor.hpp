#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace vdea::ad {

// Dense row-major f64 matrix. Everything the model needs is rank <= 2:
// vectors are 1xN or Nx1, scalars 1x1.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    static Tensor scalar(double v);
    static Tensor row(std::vector<double> v);
    static Tensor col(std::vector<double> v);
    static Tensor from(std::size_t rows, std::size_t cols, std::vector<double> v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }
    bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool is_scalar() const { return size() == 1; }

    double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double item() const;  // requires scalar

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }

    bool all_finite() const;

    bool requires_grad = false;
    std::optional<std::vector<double>> grad;  // same length as values when present

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

}  // namespace vdea::ad

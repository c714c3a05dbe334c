#include "ad/tensor.hpp"

#include <cmath>
#include <utility>

#include "common/error.hpp"

namespace vdea::ad {

Tensor Tensor::scalar(double v) {
    Tensor t(1, 1);
    t.values_[0] = v;
    return t;
}

Tensor Tensor::row(std::vector<double> v) {
    Tensor t;
    t.rows_ = 1;
    t.cols_ = v.size();
    t.values_ = std::move(v);
    return t;
}

Tensor Tensor::col(std::vector<double> v) {
    Tensor t;
    t.rows_ = v.size();
    t.cols_ = 1;
    t.values_ = std::move(v);
    return t;
}

Tensor Tensor::from(std::size_t rows, std::size_t cols, std::vector<double> v) {
    require(rows * cols == v.size(), "tensor: value count does not match shape");
    Tensor t;
    t.rows_ = rows;
    t.cols_ = cols;
    t.values_ = std::move(v);
    return t;
}

double Tensor::item() const {
    require(is_scalar(), "tensor: item() on non-scalar");
    return values_[0];
}

bool Tensor::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace vdea::ad

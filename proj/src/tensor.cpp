#include "gkp/tensor.hpp"

#include <cmath>

#include "gkp/errors.hpp"

namespace gkp {

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
    std::size_t count = 1;
    for (std::size_t d : shape_) count *= d;
    values_.assign(count, fill);
}

Tensor Tensor::scalar(double v) {
    Tensor t;
    t.values_.assign(1, v);
    return t;
}

Tensor Tensor::from_vector(std::vector<double> v) {
    Tensor t;
    t.shape_ = {v.size()};
    t.values_ = std::move(v);
    return t;
}

Tensor Tensor::from_matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
    if (v.size() != rows * cols) throw ContractViolation("from_matrix: value count does not match shape");
    Tensor t;
    t.shape_ = {rows, cols};
    t.values_ = std::move(v);
    return t;
}

bool Tensor::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

void Tensor::fill(double v) {
    for (double& x : values_) x = v;
}

double Tensor::squared_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
}

}  // namespace gkp

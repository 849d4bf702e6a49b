#pragma once

#include <cstddef>
#include <vector>

namespace gkp {

// Dense row-major 64-bit float tensor. Rank 0 (scalar) through 3 is all the
// network needs.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);

    static Tensor scalar(double v);
    static Tensor from_vector(std::vector<double> v);
    static Tensor from_matrix(std::size_t rows, std::size_t cols, std::vector<double> v);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return values_.size(); }
    std::size_t dim(std::size_t i) const { return shape_[i]; }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    // Rank-2 accessors.
    double& at(std::size_t r, std::size_t c) { return values_[r * shape_[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * shape_[1] + c]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    void fill(double v);

    double squared_norm() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

}  // namespace gkp

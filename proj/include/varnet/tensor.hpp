#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace varnet::numkit {

// Dense row-major tensor of doubles. Rank 0 (scalar), 1 (vector) and 2
// (matrix) are the shapes the rest of the library uses.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor scalar(double v);
    static Tensor vector(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return values_.size(); }

    // Rank-2 accessors; a rank-1 tensor behaves as a single column.
    std::size_t rows() const;
    std::size_t cols() const;

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& at(std::size_t r, std::size_t c);
    double at(std::size_t r, std::size_t c) const;

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    std::span<const double> row(std::size_t r) const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace varnet::numkit

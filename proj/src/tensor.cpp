#include "varnet/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace varnet::numkit {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), values_(shape_product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_product(shape_) != values_.size()) {
        throw std::invalid_argument("Tensor: shape " + shape_str() + " does not match " +
                                    std::to_string(values_.size()) + " values");
    }
}

Tensor Tensor::scalar(double v) { return Tensor({}, std::vector<double>{v}); }

Tensor Tensor::vector(std::vector<double> values) {
    std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::rows() const {
    if (shape_.empty()) return 1;
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (shape_.size() < 2) return shape_.empty() ? 1 : 1;
    return shape_[1];
}

double& Tensor::at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
double Tensor::at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

std::span<const double> Tensor::row(std::size_t r) const {
    return std::span<const double>(values_.data() + r * cols(), cols());
}

bool Tensor::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << 'x';
        os << shape_[i];
    }
    os << ']';
    return os.str();
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("squared_distance: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace varnet::numkit

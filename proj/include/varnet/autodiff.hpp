#pragma once

#include <cstdint>
#include <vector>

#include "varnet/tensor.hpp"

namespace varnet::numkit::ad {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid for the tape's lifetime.
struct Var {
    Tape* tape = nullptr;
    std::int32_t idx = -1;

    const Tensor& value() const;
};

// Define-by-run reverse-mode differentiation over Tensor-valued nodes.
//
// A tape is built fresh for every loss evaluation: leaves are inserted for
// the parameters being differentiated, constants for everything else, and
// the supported primitives below assemble the loss. Values are computed
// eagerly at construction; backward() fills per-node gradients.
//
// Supported primitives: elementwise add/sub/mul/div (with scalar
// broadcasting), matmul, row-vector bias add, relu, softplus, sigmoid, exp,
// log, sqrt, square, neg, lgamma (differentiated via digamma), sum, mean,
// row-wise min, and pairwise squared distances. Shape violations throw at
// construction time.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Differentiable leaf.
    Var leaf(Tensor value);
    // Non-differentiable input.
    Var constant(Tensor value);
    Var constant_scalar(double v);

    // Elementwise binary ops. Shapes must match, or one side must be a
    // scalar (size-1) tensor, which is broadcast.
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var div(Var a, Var b);

    // [N x K] * [K x M] -> [N x M]
    Var matmul(Var a, Var b);
    // [N x M] + [M] broadcast over rows.
    Var add_rowvec(Var a, Var bias);

    Var relu(Var a);
    Var softplus(Var a);
    Var sigmoid(Var a);
    Var exp(Var a);
    Var log(Var a);
    Var sqrt(Var a);
    Var square(Var a);
    Var neg(Var a);
    Var lgamma(Var a);

    // Reductions to a scalar node.
    Var sum(Var a);
    Var mean(Var a);

    // [N x M] -> [N x 1], minimum over each row. Gradient is routed to the
    // first attaining column (subgradient at ties).
    Var row_min(Var a);

    // [N x D], [L x D] -> [N x L] of squared Euclidean distances.
    Var pairwise_sqdist(Var x, Var c);

    // Reverse pass from a scalar loss node. May be called once per tape.
    void backward(Var loss);

    const Tensor& value(Var v) const;
    // Gradient of the loss with respect to a node; valid after backward().
    // Zero tensor if the node did not influence the loss.
    const Tensor& grad(Var v) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        Leaf, Const,
        Add, Sub, Mul, Div,
        MatMul, AddRowVec,
        Relu, Softplus, Sigmoid, Exp, Log, Sqrt, Square, Neg, LGamma,
        Sum, Mean, RowMin, PairwiseSqDist,
    };

    struct Node {
        Op op;
        std::int32_t a = -1;
        std::int32_t b = -1;
        bool requires_grad = false;
        Tensor value;
        Tensor grad;
        std::vector<std::uint32_t> aux;  // RowMin argmin columns
    };

    Var push(Node n);
    Var unary(Op op, Var a, Tensor value);
    Var binary_elementwise(Op op, Var a, Var b);
    void check_same_tape(Var v) const;
    void accumulate(std::int32_t idx, const Tensor& g);
    void backprop_node(std::int32_t i);

    std::vector<Node> nodes_;
    bool backward_done_ = false;
    Tensor zero_ = Tensor::scalar(0.0);
};

// Convenience operators (elementwise, scalar-broadcasting).
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator+(Var a, double b);
Var operator-(Var a, double b);
Var operator*(Var a, double b);
Var operator/(Var a, double b);
Var operator+(double a, Var b);
Var operator-(double a, Var b);
Var operator*(double a, Var b);
Var operator-(Var a);

// Digamma (derivative of lgamma); recurrence plus asymptotic series,
// accurate to ~1e-12 for positive arguments.
double digamma(double x);

// Numerically stable scalar versions shared with non-tape code paths.
double softplus(double x);
double sigmoid(double x);

}  // namespace varnet::numkit::ad

#include "varnet/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace varnet::numkit::ad {

double softplus(double x) {
    // max(x,0) + log1p(exp(-|x|)) never overflows.
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("digamma: requires x > 0");
    double result = 0.0;
    // Shift into the asymptotic region.
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    double inv = 1.0 / x;
    double inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum B_{2n}/(2n x^{2n})
    result += std::log(x) - 0.5 * inv
        - inv2 * (1.0 / 12.0
        - inv2 * (1.0 / 120.0
        - inv2 * (1.0 / 252.0
        - inv2 * (1.0 / 240.0
        - inv2 * (1.0 / 132.0
        - inv2 * (691.0 / 32760.0
        - inv2 * (1.0 / 12.0)))))));
    return result;
}

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::push(Node n) {
    if (backward_done_) throw std::logic_error("Tape: cannot extend after backward()");
    nodes_.push_back(std::move(n));
    return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

void Tape::check_same_tape(Var v) const {
    if (v.tape != this || v.idx < 0 || v.idx >= static_cast<std::int32_t>(nodes_.size())) {
        throw std::logic_error("Tape: Var does not belong to this tape");
    }
}

Var Tape::leaf(Tensor value) {
    Node n;
    n.op = Op::Leaf;
    n.requires_grad = true;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::constant(Tensor value) {
    Node n;
    n.op = Op::Const;
    n.requires_grad = false;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::constant_scalar(double v) { return constant(Tensor::scalar(v)); }

Var Tape::unary(Op op, Var a, Tensor value) {
    check_same_tape(a);
    Node n;
    n.op = op;
    n.a = a.idx;
    n.requires_grad = nodes_[a.idx].requires_grad;
    n.value = std::move(value);
    return push(std::move(n));
}

namespace {

bool scalar_like(const Tensor& t) { return t.size() == 1; }

}  // namespace

Var Tape::binary_elementwise(Op op, Var a, Var b) {
    check_same_tape(a);
    check_same_tape(b);
    const Tensor& va = nodes_[a.idx].value;
    const Tensor& vb = nodes_[b.idx].value;
    if (!va.same_shape(vb) && !scalar_like(va) && !scalar_like(vb)) {
        throw std::invalid_argument("Tape: elementwise shape mismatch " + va.shape_str() +
                                    " vs " + vb.shape_str());
    }
    const Tensor& big = scalar_like(va) ? vb : va;
    Tensor out(big.shape());
    std::size_t n = big.size();
    bool sa = scalar_like(va), sb = scalar_like(vb);
    for (std::size_t i = 0; i < n; ++i) {
        double x = va[sa ? 0 : i];
        double y = vb[sb ? 0 : i];
        switch (op) {
            case Op::Add: out[i] = x + y; break;
            case Op::Sub: out[i] = x - y; break;
            case Op::Mul: out[i] = x * y; break;
            case Op::Div: out[i] = x / y; break;
            default: throw std::logic_error("not a binary op");
        }
    }
    Node node;
    node.op = op;
    node.a = a.idx;
    node.b = b.idx;
    node.requires_grad = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    node.value = std::move(out);
    return push(std::move(node));
}

Var Tape::add(Var a, Var b) { return binary_elementwise(Op::Add, a, b); }
Var Tape::sub(Var a, Var b) { return binary_elementwise(Op::Sub, a, b); }
Var Tape::mul(Var a, Var b) { return binary_elementwise(Op::Mul, a, b); }
Var Tape::div(Var a, Var b) { return binary_elementwise(Op::Div, a, b); }

Var Tape::matmul(Var a, Var b) {
    check_same_tape(a);
    check_same_tape(b);
    const Tensor& va = nodes_[a.idx].value;
    const Tensor& vb = nodes_[b.idx].value;
    if (va.rank() != 2 || vb.rank() != 2 || va.cols() != vb.rows()) {
        throw std::invalid_argument("Tape: matmul shape mismatch " + va.shape_str() + " * " +
                                    vb.shape_str());
    }
    std::size_t n = va.rows(), k = va.cols(), m = vb.cols();
    Tensor out({n, m});
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = va.values().data() + i * k;
        double* orow = out.values().data() + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            double av = arow[p];
            if (av == 0.0) continue;
            const double* brow = vb.values().data() + p * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
    Node node;
    node.op = Op::MatMul;
    node.a = a.idx;
    node.b = b.idx;
    node.requires_grad = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    node.value = std::move(out);
    return push(std::move(node));
}

Var Tape::add_rowvec(Var a, Var bias) {
    check_same_tape(a);
    check_same_tape(bias);
    const Tensor& va = nodes_[a.idx].value;
    const Tensor& vb = nodes_[bias.idx].value;
    if (va.rank() != 2 || vb.size() != va.cols()) {
        throw std::invalid_argument("Tape: add_rowvec shape mismatch " + va.shape_str() +
                                    " + " + vb.shape_str());
    }
    Tensor out = va;
    std::size_t n = va.rows(), m = va.cols();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) out.values()[i * m + j] += vb[j];
    }
    Node node;
    node.op = Op::AddRowVec;
    node.a = a.idx;
    node.b = bias.idx;
    node.requires_grad = nodes_[a.idx].requires_grad || nodes_[bias.idx].requires_grad;
    node.value = std::move(out);
    return push(std::move(node));
}

Var Tape::relu(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    Tensor out(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? v[i] : 0.0;
    return unary(Op::Relu, a, std::move(out));
}

Var Tape::softplus(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    Tensor out(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = ad::softplus(v[i]);
    return unary(Op::Softplus, a, std::move(out));
}

Var Tape::sigmoid(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    Tensor out(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = ad::sigmoid(v[i]);
    return unary(Op::Sigmoid, a, std::move(out));
}

Var Tape::exp(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    Tensor out(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::exp(v[i]);
    return unary(Op::Exp, a, std::move(out));
}

Var Tape::log(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    Tensor out(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
    return unary(Op::Log, a, std::move(out));
}

Var Tape::sqrt(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    Tensor out(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::sqrt(v[i]);
    return unary(Op::Sqrt, a, std::move(out));
}

Var Tape::square(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    Tensor out(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
    return unary(Op::Square, a, std::move(out));
}

Var Tape::neg(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    Tensor out(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
    return unary(Op::Neg, a, std::move(out));
}

Var Tape::lgamma(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    Tensor out(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0)) throw std::invalid_argument("Tape: lgamma requires positive input");
        out[i] = std::lgamma(v[i]);
    }
    return unary(Op::LGamma, a, std::move(out));
}

Var Tape::sum(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i];
    return unary(Op::Sum, a, Tensor::scalar(s));
}

Var Tape::mean(Var a) {
    const Tensor& v = nodes_[a.idx].value;
    if (v.size() == 0) throw std::invalid_argument("Tape: mean of empty tensor");
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i];
    return unary(Op::Mean, a, Tensor::scalar(s / static_cast<double>(v.size())));
}

Var Tape::row_min(Var a) {
    check_same_tape(a);
    const Tensor& v = nodes_[a.idx].value;
    if (v.rank() != 2 || v.cols() == 0) {
        throw std::invalid_argument("Tape: row_min requires a nonempty matrix");
    }
    std::size_t n = v.rows(), m = v.cols();
    Tensor out({n, 1});
    std::vector<std::uint32_t> arg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = v.values()[i * m];
        std::uint32_t bj = 0;
        for (std::size_t j = 1; j < m; ++j) {
            double x = v.values()[i * m + j];
            if (x < best) {
                best = x;
                bj = static_cast<std::uint32_t>(j);
            }
        }
        out[i] = best;
        arg[i] = bj;
    }
    Node node;
    node.op = Op::RowMin;
    node.a = a.idx;
    node.requires_grad = nodes_[a.idx].requires_grad;
    node.value = std::move(out);
    node.aux = std::move(arg);
    return push(std::move(node));
}

Var Tape::pairwise_sqdist(Var x, Var c) {
    check_same_tape(x);
    check_same_tape(c);
    const Tensor& vx = nodes_[x.idx].value;
    const Tensor& vc = nodes_[c.idx].value;
    if (vx.rank() != 2 || vc.rank() != 2 || vx.cols() != vc.cols()) {
        throw std::invalid_argument("Tape: pairwise_sqdist shape mismatch " + vx.shape_str() +
                                    " vs " + vc.shape_str());
    }
    std::size_t n = vx.rows(), l = vc.rows(), d = vx.cols();
    Tensor out({n, l});
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = vx.values().data() + i * d;
        for (std::size_t j = 0; j < l; ++j) {
            const double* cj = vc.values().data() + j * d;
            double s = 0.0;
            for (std::size_t p = 0; p < d; ++p) {
                double diff = xi[p] - cj[p];
                s += diff * diff;
            }
            out.values()[i * l + j] = s;
        }
    }
    Node node;
    node.op = Op::PairwiseSqDist;
    node.a = x.idx;
    node.b = c.idx;
    node.requires_grad = nodes_[x.idx].requires_grad || nodes_[c.idx].requires_grad;
    node.value = std::move(out);
    return push(std::move(node));
}

void Tape::accumulate(std::int32_t idx, const Tensor& g) {
    Node& n = nodes_[idx];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) n.grad = Tensor(n.value.shape());
    if (g.same_shape(n.grad)) {
        for (std::size_t i = 0; i < g.size(); ++i) n.grad[i] += g[i];
    } else if (g.size() == n.grad.size()) {
        // Same element count, shapes like [N] vs [N x 1]; treat as flat.
        for (std::size_t i = 0; i < g.size(); ++i) n.grad[i] += g[i];
    } else {
        throw std::logic_error("Tape: gradient shape mismatch");
    }
}

void Tape::backprop_node(std::int32_t i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) return;
    const Tensor& g = n.grad;
    auto parent_value = [&](std::int32_t p) -> const Tensor& { return nodes_[p].value; };

    switch (n.op) {
        case Op::Leaf:
        case Op::Const:
            break;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            const Tensor& va = parent_value(n.a);
            const Tensor& vb = parent_value(n.b);
            bool sa = scalar_like(va), sb = scalar_like(vb);
            Tensor ga(va.shape());
            Tensor gb(vb.shape());
            for (std::size_t e = 0; e < g.size(); ++e) {
                double x = va[sa ? 0 : e];
                double y = vb[sb ? 0 : e];
                double da = 0.0, db = 0.0;
                switch (n.op) {
                    case Op::Add: da = g[e]; db = g[e]; break;
                    case Op::Sub: da = g[e]; db = -g[e]; break;
                    case Op::Mul: da = g[e] * y; db = g[e] * x; break;
                    case Op::Div: da = g[e] / y; db = -g[e] * x / (y * y); break;
                    default: break;
                }
                ga[sa ? 0 : e] += da;
                gb[sb ? 0 : e] += db;
            }
            accumulate(n.a, ga);
            accumulate(n.b, gb);
            break;
        }
        case Op::MatMul: {
            const Tensor& va = parent_value(n.a);
            const Tensor& vb = parent_value(n.b);
            std::size_t ra = va.rows(), k = va.cols(), m = vb.cols();
            if (nodes_[n.a].requires_grad) {
                Tensor ga(va.shape());
                // dA = G * B^T
                for (std::size_t i2 = 0; i2 < ra; ++i2) {
                    for (std::size_t p = 0; p < k; ++p) {
                        double s = 0.0;
                        const double* grow = g.values().data() + i2 * m;
                        const double* brow = vb.values().data() + p * m;
                        for (std::size_t j = 0; j < m; ++j) s += grow[j] * brow[j];
                        ga.values()[i2 * k + p] = s;
                    }
                }
                accumulate(n.a, ga);
            }
            if (nodes_[n.b].requires_grad) {
                Tensor gb(vb.shape());
                // dB = A^T * G
                for (std::size_t i2 = 0; i2 < ra; ++i2) {
                    const double* arow = va.values().data() + i2 * k;
                    const double* grow = g.values().data() + i2 * m;
                    for (std::size_t p = 0; p < k; ++p) {
                        double av = arow[p];
                        if (av == 0.0) continue;
                        double* dst = gb.values().data() + p * m;
                        for (std::size_t j = 0; j < m; ++j) dst[j] += av * grow[j];
                    }
                }
                accumulate(n.b, gb);
            }
            break;
        }
        case Op::AddRowVec: {
            const Tensor& va = parent_value(n.a);
            std::size_t rows = va.rows(), m = va.cols();
            accumulate(n.a, g);
            if (nodes_[n.b].requires_grad) {
                Tensor gb(parent_value(n.b).shape());
                for (std::size_t i2 = 0; i2 < rows; ++i2) {
                    for (std::size_t j = 0; j < m; ++j) gb[j] += g.values()[i2 * m + j];
                }
                accumulate(n.b, gb);
            }
            break;
        }
        case Op::Relu: {
            const Tensor& va = parent_value(n.a);
            Tensor ga(va.shape());
            for (std::size_t e = 0; e < g.size(); ++e) ga[e] = va[e] > 0.0 ? g[e] : 0.0;
            accumulate(n.a, ga);
            break;
        }
        case Op::Softplus: {
            const Tensor& va = parent_value(n.a);
            Tensor ga(va.shape());
            for (std::size_t e = 0; e < g.size(); ++e) ga[e] = g[e] * ad::sigmoid(va[e]);
            accumulate(n.a, ga);
            break;
        }
        case Op::Sigmoid: {
            Tensor ga(n.value.shape());
            for (std::size_t e = 0; e < g.size(); ++e) {
                double s = n.value[e];
                ga[e] = g[e] * s * (1.0 - s);
            }
            accumulate(n.a, ga);
            break;
        }
        case Op::Exp: {
            Tensor ga(n.value.shape());
            for (std::size_t e = 0; e < g.size(); ++e) ga[e] = g[e] * n.value[e];
            accumulate(n.a, ga);
            break;
        }
        case Op::Log: {
            const Tensor& va = parent_value(n.a);
            Tensor ga(va.shape());
            for (std::size_t e = 0; e < g.size(); ++e) ga[e] = g[e] / va[e];
            accumulate(n.a, ga);
            break;
        }
        case Op::Sqrt: {
            Tensor ga(n.value.shape());
            for (std::size_t e = 0; e < g.size(); ++e) ga[e] = g[e] * 0.5 / n.value[e];
            accumulate(n.a, ga);
            break;
        }
        case Op::Square: {
            const Tensor& va = parent_value(n.a);
            Tensor ga(va.shape());
            for (std::size_t e = 0; e < g.size(); ++e) ga[e] = g[e] * 2.0 * va[e];
            accumulate(n.a, ga);
            break;
        }
        case Op::Neg: {
            Tensor ga(n.value.shape());
            for (std::size_t e = 0; e < g.size(); ++e) ga[e] = -g[e];
            accumulate(n.a, ga);
            break;
        }
        case Op::LGamma: {
            const Tensor& va = parent_value(n.a);
            Tensor ga(va.shape());
            for (std::size_t e = 0; e < g.size(); ++e) ga[e] = g[e] * digamma(va[e]);
            accumulate(n.a, ga);
            break;
        }
        case Op::Sum: {
            const Tensor& va = parent_value(n.a);
            Tensor ga(va.shape(), g[0]);
            accumulate(n.a, ga);
            break;
        }
        case Op::Mean: {
            const Tensor& va = parent_value(n.a);
            Tensor ga(va.shape(), g[0] / static_cast<double>(va.size()));
            accumulate(n.a, ga);
            break;
        }
        case Op::RowMin: {
            const Tensor& va = parent_value(n.a);
            std::size_t m = va.cols();
            Tensor ga(va.shape());
            for (std::size_t r = 0; r < va.rows(); ++r) {
                ga.values()[r * m + n.aux[r]] = g[r];
            }
            accumulate(n.a, ga);
            break;
        }
        case Op::PairwiseSqDist: {
            const Tensor& vx = parent_value(n.a);
            const Tensor& vc = parent_value(n.b);
            std::size_t rows = vx.rows(), l = vc.rows(), d = vx.cols();
            bool need_x = nodes_[n.a].requires_grad;
            bool need_c = nodes_[n.b].requires_grad;
            Tensor gx(vx.shape());
            Tensor gc(vc.shape());
            for (std::size_t i2 = 0; i2 < rows; ++i2) {
                const double* xi = vx.values().data() + i2 * d;
                for (std::size_t j = 0; j < l; ++j) {
                    double ge = g.values()[i2 * l + j];
                    if (ge == 0.0) continue;
                    const double* cj = vc.values().data() + j * d;
                    for (std::size_t p = 0; p < d; ++p) {
                        double diff = xi[p] - cj[p];
                        if (need_x) gx.values()[i2 * d + p] += 2.0 * ge * diff;
                        if (need_c) gc.values()[j * d + p] -= 2.0 * ge * diff;
                    }
                }
            }
            if (need_x) accumulate(n.a, gx);
            if (need_c) accumulate(n.b, gc);
            break;
        }
    }
}

void Tape::backward(Var loss) {
    check_same_tape(loss);
    if (backward_done_) throw std::logic_error("Tape: backward() already ran");
    if (nodes_[loss.idx].value.size() != 1) {
        throw std::invalid_argument("Tape: backward requires a scalar loss");
    }
    backward_done_ = true;
    Node& l = nodes_[loss.idx];
    if (!l.requires_grad) return;  // loss does not depend on any leaf
    l.grad = Tensor(l.value.shape(), 1.0);
    for (std::int32_t i = loss.idx; i >= 0; --i) backprop_node(i);
}

const Tensor& Tape::value(Var v) const {
    check_same_tape(v);
    return nodes_[v.idx].value;
}

const Tensor& Tape::grad(Var v) const {
    check_same_tape(v);
    const Node& n = nodes_[v.idx];
    if (n.grad.size() == 0) {
        const_cast<Tape*>(this)->nodes_[v.idx].grad = Tensor(n.value.shape());
    }
    return nodes_[v.idx].grad;
}

Var operator+(Var a, Var b) { return a.tape->add(a, b); }
Var operator-(Var a, Var b) { return a.tape->sub(a, b); }
Var operator*(Var a, Var b) { return a.tape->mul(a, b); }
Var operator/(Var a, Var b) { return a.tape->div(a, b); }
Var operator+(Var a, double b) { return a.tape->add(a, a.tape->constant_scalar(b)); }
Var operator-(Var a, double b) { return a.tape->sub(a, a.tape->constant_scalar(b)); }
Var operator*(Var a, double b) { return a.tape->mul(a, a.tape->constant_scalar(b)); }
Var operator/(Var a, double b) { return a.tape->div(a, a.tape->constant_scalar(b)); }
Var operator+(double a, Var b) { return b.tape->add(b.tape->constant_scalar(a), b); }
Var operator-(double a, Var b) { return b.tape->sub(b.tape->constant_scalar(a), b); }
Var operator*(double a, Var b) { return b.tape->mul(b.tape->constant_scalar(a), b); }
Var operator-(Var a) { return a.tape->neg(a); }

}  // namespace varnet::numkit::ad

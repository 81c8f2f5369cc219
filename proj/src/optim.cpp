#include "varnet/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace varnet::numkit {

void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam_step: params/grads count mismatch");
    }
    if (!(state.lr > 0.0)) throw std::invalid_argument("adam_step: lr must be positive");
    for (std::size_t p = 0; p < params.size(); ++p) {
        if (!params[p]->same_shape(grads[p])) {
            throw std::invalid_argument("adam_step: gradient shape mismatch at param " +
                                        std::to_string(p));
        }
        if (!grads[p].all_finite()) {
            throw std::runtime_error("adam_step: non-finite gradient at param " +
                                     std::to_string(p) + "; step rejected");
        }
    }
    if (state.m.empty()) {
        for (std::size_t p = 0; p < params.size(); ++p) {
            state.m.emplace_back(params[p]->shape());
            state.v.emplace_back(params[p]->shape());
        }
    }
    if (state.m.size() != params.size()) {
        throw std::invalid_argument("adam_step: state was created for a different param group");
    }
    state.t += 1;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& w = *params[p];
        const Tensor& g = grads[p];
        Tensor& m = state.m[p];
        Tensor& v = state.v[p];
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            double mhat = m[i] / bc1;
            double vhat = v[i] / bc2;
            w[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

GradCheckResult finite_diff_check(const LossBuilder& loss, std::span<Tensor* const> params,
                                  double h, double denom_floor) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff_check: h must be positive");

    auto eval = [&]() {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        vars.reserve(params.size());
        for (Tensor* t : params) vars.push_back(tape.leaf(*t));
        ad::Var l = loss(tape, vars);
        return tape.value(l)[0];
    };

    // Reverse-mode gradients once.
    std::vector<Tensor> analytic;
    {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        for (Tensor* t : params) vars.push_back(tape.leaf(*t));
        ad::Var l = loss(tape, vars);
        tape.backward(l);
        for (ad::Var v : vars) analytic.push_back(tape.grad(v));
    }

    GradCheckResult res;
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& t = *params[p];
        for (std::size_t i = 0; i < t.size(); ++i) {
            double orig = t[i];
            t[i] = orig + h;
            double fp = eval();
            t[i] = orig - h;
            double fm = eval();
            t[i] = orig;
            double numeric = (fp - fm) / (2.0 * h);
            double a = analytic[p][i];
            double denom = std::max({std::abs(a), std::abs(numeric), denom_floor});
            double rel = std::abs(a - numeric) / denom;
            if (rel > res.max_rel_err) {
                res.max_rel_err = rel;
                res.worst_param = p;
                res.worst_coord = i;
                res.analytic = a;
                res.numeric = numeric;
            }
        }
    }
    return res;
}

}  // namespace varnet::numkit

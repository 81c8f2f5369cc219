#pragma once

#include <functional>
#include <span>
#include <vector>

#include "varnet/autodiff.hpp"
#include "varnet/tensor.hpp"

namespace varnet::numkit {

// Adam with standard bias correction. One state instance per parameter
// group; the group's tensor list must keep the same order across steps.
struct AdamState {
    double lr = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t t = 0;
    std::vector<Tensor> m;  // first moments, shaped like the params
    std::vector<Tensor> v;  // second moments

    static AdamState create(double lr) {
        AdamState s;
        s.lr = lr;
        return s;
    }
};

// In-place update of params. Moment tensors are allocated on first use.
// Throws on shape mismatch or non-finite gradients (the step is rejected).
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state);

// Builds a scalar loss on the tape given leaf vars for each parameter;
// used both to read the value and to run the reverse pass.
using LossBuilder = std::function<ad::Var(ad::Tape&, std::span<const ad::Var>)>;

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t worst_param = 0;    // index into the param list
    std::size_t worst_coord = 0;    // flat index within that tensor
    double analytic = 0.0;
    double numeric = 0.0;
};

// Central-difference verification of the reverse-mode gradients. The
// relative error uses an absolute floor in the denominator so components
// near zero are compared on an absolute scale.
GradCheckResult finite_diff_check(const LossBuilder& loss, std::span<Tensor* const> params,
                                  double h, double denom_floor = 1e-2);

}  // namespace varnet::numkit

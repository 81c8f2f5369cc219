#pragma once

#include <vector>

#include "varnet/autodiff.hpp"
#include "varnet/rng.hpp"
#include "varnet/tensor.hpp"

namespace varnet::numkit {

enum class HiddenActivation { ReLU };
enum class OutputActivation { Identity, Softplus };

// Fully connected network. Hidden layers use ReLU; the output layer applies
// Identity or Softplus (the latter guarantees strictly positive outputs).
struct Mlp {
    std::vector<std::size_t> layer_sizes;  // [in, hidden..., out]
    HiddenActivation hidden_activation = HiddenActivation::ReLU;
    OutputActivation output_activation = OutputActivation::Identity;
    std::vector<Tensor> weights;  // per layer, [fan_in x fan_out]
    std::vector<Tensor> biases;   // per layer, [fan_out]

    std::size_t num_layers() const { return weights.size(); }
    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }
    std::size_t param_count() const;
};

// Weights and biases drawn uniformly from [-1/sqrt(fan_in), +1/sqrt(fan_in)].
Mlp make_mlp(std::vector<std::size_t> layer_sizes, OutputActivation out_act, Rng& rng);

// Deterministic batched forward pass; X is [N x input_dim].
Tensor mlp_forward(const Mlp& net, const Tensor& X);

// Tape leaves (or constants, when frozen) for one network's parameters.
struct MlpVars {
    std::vector<ad::Var> weights;
    std::vector<ad::Var> biases;
};

MlpVars mlp_vars(ad::Tape& tape, const Mlp& net, bool trainable);

// Forward pass on the tape; activations follow `net`'s configuration.
ad::Var mlp_graph(ad::Tape& tape, const Mlp& net, const MlpVars& vars, ad::Var X);

// Pointers to every parameter tensor, layer-major (W0, b0, W1, b1, ...).
std::vector<Tensor*> mlp_params(Mlp& net);

}  // namespace varnet::numkit

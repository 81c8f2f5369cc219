#include "varnet/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace varnet::numkit {

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

Mlp make_mlp(std::vector<std::size_t> layer_sizes, OutputActivation out_act, Rng& rng) {
    if (layer_sizes.size() < 2) {
        throw std::invalid_argument("make_mlp: need at least input and output sizes");
    }
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw std::invalid_argument("make_mlp: zero-width layer");
    }
    Mlp net;
    net.layer_sizes = std::move(layer_sizes);
    net.output_activation = out_act;
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        std::size_t fan_in = net.layer_sizes[l];
        std::size_t fan_out = net.layer_sizes[l + 1];
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Tensor w({fan_in, fan_out});
        for (double& v : w.values()) v = rng.uniform(-bound, bound);
        Tensor b({fan_out});
        for (double& v : b.values()) v = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

Tensor mlp_forward(const Mlp& net, const Tensor& X) {
    if (X.rank() != 2 || X.cols() != net.input_dim()) {
        throw std::invalid_argument("mlp_forward: input shape " + X.shape_str() +
                                    " incompatible with first layer of width " +
                                    std::to_string(net.input_dim()));
    }
    if (!X.all_finite()) throw std::invalid_argument("mlp_forward: non-finite input");
    Tensor cur = X;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const Tensor& w = net.weights[l];
        const Tensor& b = net.biases[l];
        std::size_t n = cur.rows(), k = cur.cols(), m = w.cols();
        Tensor next({n, m});
        for (std::size_t i = 0; i < n; ++i) {
            double* orow = next.values().data() + i * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] = b[j];
            const double* arow = cur.values().data() + i * k;
            for (std::size_t p = 0; p < k; ++p) {
                double av = arow[p];
                if (av == 0.0) continue;
                const double* wrow = w.values().data() + p * m;
                for (std::size_t j = 0; j < m; ++j) orow[j] += av * wrow[j];
            }
        }
        bool last = (l + 1 == net.num_layers());
        if (!last) {
            for (double& v : next.values()) v = v > 0.0 ? v : 0.0;
        } else if (net.output_activation == OutputActivation::Softplus) {
            for (double& v : next.values()) v = ad::softplus(v);
        }
        cur = std::move(next);
    }
    return cur;
}

MlpVars mlp_vars(ad::Tape& tape, const Mlp& net, bool trainable) {
    MlpVars vars;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        vars.weights.push_back(trainable ? tape.leaf(net.weights[l]) : tape.constant(net.weights[l]));
        vars.biases.push_back(trainable ? tape.leaf(net.biases[l]) : tape.constant(net.biases[l]));
    }
    return vars;
}

ad::Var mlp_graph(ad::Tape& tape, const Mlp& net, const MlpVars& vars, ad::Var X) {
    ad::Var cur = X;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        cur = tape.add_rowvec(tape.matmul(cur, vars.weights[l]), vars.biases[l]);
        bool last = (l + 1 == net.num_layers());
        if (!last) {
            cur = tape.relu(cur);
        } else if (net.output_activation == OutputActivation::Softplus) {
            cur = tape.softplus(cur);
        }
    }
    return cur;
}

std::vector<Tensor*> mlp_params(Mlp& net) {
    std::vector<Tensor*> out;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        out.push_back(&net.weights[l]);
        out.push_back(&net.biases[l]);
    }
    return out;
}

}  // namespace varnet::numkit

#include "varnet/sampler.hpp"

#include <stdexcept>

namespace varnet::sampler {

void LocalityConfig::validate(std::size_t dataset_size) const {
    if (m < 1 || m > dataset_size) {
        throw std::invalid_argument("LocalityConfig: need 1 <= m <= N (m=" + std::to_string(m) +
                                    ", N=" + std::to_string(dataset_size) + ")");
    }
    if (n < 1 || n > k || k > dataset_size) {
        throw std::invalid_argument("LocalityConfig: need 1 <= n <= k <= N (n=" +
                                    std::to_string(n) + ", k=" + std::to_string(k) +
                                    ", N=" + std::to_string(dataset_size) + ")");
    }
}

std::vector<double> inclusion_probabilities(const NeighborGraph& g, const LocalityConfig& cfg) {
    cfg.validate(g.n);
    if (cfg.k != g.k) {
        throw std::invalid_argument("inclusion_probabilities: cfg.k=" + std::to_string(cfg.k) +
                                    " does not match graph k=" + std::to_string(g.k));
    }
    auto counts = neighbors::reverse_membership_counts(g);
    double scale = static_cast<double>(cfg.m) * static_cast<double>(cfg.n) /
                   (static_cast<double>(g.n) * static_cast<double>(g.k));
    std::vector<double> pi(g.n);
    for (std::size_t j = 0; j < g.n; ++j) pi[j] = scale * counts[j];
    return pi;
}

MiniBatch locality_sample(const NeighborGraph& g, const LocalityConfig& cfg, Rng& rng) {
    return locality_sample(g, cfg, inclusion_probabilities(g, cfg), rng);
}

MiniBatch locality_sample(const NeighborGraph& g, const LocalityConfig& cfg,
                          const std::vector<double>& pi, Rng& rng) {
    cfg.validate(g.n);
    if (pi.size() != g.n) throw std::invalid_argument("locality_sample: pi size mismatch");

    MiniBatch batch;
    batch.indices.reserve(cfg.m * cfg.n);
    std::vector<std::size_t> psu = rng.sample_without_replacement(g.n, cfg.m);
    // Dedup via membership flags; a point drawn through two primary units
    // appears once (its HT weight already reflects multiplicity through pi).
    std::vector<bool> seen(g.n, false);
    for (std::size_t p : psu) {
        std::vector<std::size_t> picks = rng.sample_without_replacement(g.k, cfg.n);
        for (std::size_t s : picks) {
            std::uint32_t j = g.at(p, s);
            if (!seen[j]) {
                seen[j] = true;
                batch.indices.push_back(j);
            }
        }
    }
    batch.ht_weights.reserve(batch.indices.size());
    for (std::uint32_t j : batch.indices) {
        batch.ht_weights.push_back(1.0 / pi[j]);
    }
    return batch;
}

MiniBatch uniform_sample(std::size_t n, std::size_t batch_size, Rng& rng) {
    if (batch_size < 1 || batch_size > n) {
        throw std::invalid_argument("uniform_sample: need 1 <= B <= N (B=" +
                                    std::to_string(batch_size) + ", N=" + std::to_string(n) + ")");
    }
    MiniBatch batch;
    auto picks = rng.sample_without_replacement(n, batch_size);
    batch.indices.assign(picks.begin(), picks.end());
    double w = static_cast<double>(n) / static_cast<double>(batch_size);
    batch.ht_weights.assign(batch_size, w);
    return batch;
}

}  // namespace varnet::sampler

#pragma once

#include <vector>

#include "varnet/neighbors.hpp"
#include "varnet/rng.hpp"

namespace varnet::sampler {

using neighbors::NeighborGraph;
using numkit::Rng;

// Locality sampler setup: m primary sampling units drawn uniformly, then n
// secondary units from each primary unit's k-neighborhood.
struct LocalityConfig {
    std::size_t m = 1;  // psu
    std::size_t n = 10; // ssu
    std::size_t k = 20; // neighborhood size

    void validate(std::size_t dataset_size) const;
};

// Default neighborhood size when only psu/ssu are given: enough slack that
// the without-replacement secondary draw is well-posed.
inline std::size_t default_k(std::size_t ssu) { return std::max<std::size_t>(20, 2 * ssu); }

struct MiniBatch {
    std::vector<std::uint32_t> indices;  // deduplicated
    std::vector<double> ht_weights;      // 1/pi per index
};

// pi_j = (m*n)/(N*k) * |{i : j in O_k(i)}|. With overlapping neighborhoods
// this is the expected inclusion count rather than an exact probability;
// it is exact when neighborhoods are disjoint or m = 1. Self-inclusion
// guarantees positivity.
std::vector<double> inclusion_probabilities(const NeighborGraph& g, const LocalityConfig& cfg);

// Draw m psu without replacement, n ssu from each psu's neighbor row
// without replacement, and return the deduplicated union with HT weights.
MiniBatch locality_sample(const NeighborGraph& g, const LocalityConfig& cfg, Rng& rng);
// Variant with precomputed inclusion probabilities (training hot path).
MiniBatch locality_sample(const NeighborGraph& g, const LocalityConfig& cfg,
                          const std::vector<double>& pi, Rng& rng);

// B indices without replacement, each with HT weight N/B.
MiniBatch uniform_sample(std::size_t n, std::size_t batch, Rng& rng);

}  // namespace varnet::sampler

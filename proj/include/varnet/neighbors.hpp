#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varnet/tensor.hpp"

namespace varnet::neighbors {

using numkit::Tensor;

// Exact k-nearest-neighbor graph. Row i lists the k nearest neighbors of
// point i by ascending Euclidean distance; by convention a point is its own
// nearest neighbor, so indices[i][0] == i. Ties break toward lower index.
struct NeighborGraph {
    std::size_t k = 0;
    std::size_t n = 0;
    std::vector<std::uint32_t> indices;  // row-major [n x k]

    std::uint32_t at(std::size_t row, std::size_t j) const { return indices[row * k + j]; }
};

// O(N^2 D) brute force; throws if k < 1 or k > N. Distances are whatever
// scale X carries, so callers standardize features first.
NeighborGraph build_knn(const Tensor& X, std::size_t k);

// counts[j] = number of rows whose neighbor list contains j.
std::vector<std::uint32_t> reverse_membership_counts(const NeighborGraph& g);

// min_i ||centers_i - x||.
double min_center_distance(std::span<const double> x, const Tensor& centers);

// Binary cache: little-endian u32 N, u32 k, then N*k u32 indices.
void save_graph(const std::string& path, const NeighborGraph& g);
NeighborGraph load_graph(const std::string& path);
// FNV-1a over (k, X bytes); callers key cache files on it.
std::uint64_t graph_cache_key(const Tensor& X, std::size_t k);

}  // namespace varnet::neighbors

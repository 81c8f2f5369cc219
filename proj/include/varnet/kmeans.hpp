#pragma once

#include "varnet/rng.hpp"
#include "varnet/tensor.hpp"

namespace varnet::numkit {

// Lloyd's algorithm with k-means++ seeding. Clusters that empty out are
// re-seeded to the point farthest from its assigned center. Throws when
// L < 1 or L > N.
Tensor kmeans(const Tensor& points, std::size_t L, std::size_t iters, Rng& rng);

// Sum of squared distances from each point to its nearest center.
double kmeans_objective(const Tensor& points, const Tensor& centers);

}  // namespace varnet::numkit

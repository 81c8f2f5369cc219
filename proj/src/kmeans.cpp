#include "varnet/kmeans.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace varnet::numkit {

namespace {

std::size_t nearest_center(const Tensor& points, std::size_t i, const Tensor& centers,
                           std::size_t used, double* dist_out) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bj = 0;
    for (std::size_t j = 0; j < used; ++j) {
        double d = squared_distance(points.row(i), centers.row(j));
        if (d < best) {
            best = d;
            bj = j;
        }
    }
    if (dist_out) *dist_out = best;
    return bj;
}

}  // namespace

double kmeans_objective(const Tensor& points, const Tensor& centers) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        double d = 0.0;
        nearest_center(points, i, centers, centers.rows(), &d);
        total += d;
    }
    return total;
}

Tensor kmeans(const Tensor& points, std::size_t L, std::size_t iters, Rng& rng) {
    std::size_t n = points.rows();
    std::size_t d = points.cols();
    if (points.rank() != 2 || n == 0) throw std::invalid_argument("kmeans: empty input");
    if (L < 1 || L > n) {
        throw std::invalid_argument("kmeans: L must satisfy 1 <= L <= N (got L=" +
                                    std::to_string(L) + ", N=" + std::to_string(n) + ")");
    }

    Tensor centers({L, d});
    auto set_center = [&](std::size_t j, std::size_t i) {
        for (std::size_t p = 0; p < d; ++p) centers.at(j, p) = points.at(i, p);
    };

    // k-means++ seeding: first center uniform, the rest D^2-weighted.
    set_center(0, static_cast<std::size_t>(rng.below(n)));
    std::vector<double> d2(n);
    for (std::size_t j = 1; j < L; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest_center(points, i, centers, j, &d2[i]);
            total += d2[i];
        }
        std::size_t pick;
        if (total <= 0.0) {
            // All remaining mass sits on existing centers; any point works.
            pick = static_cast<std::size_t>(rng.below(n));
        } else {
            double r = rng.u01() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
        }
        set_center(j, pick);
    }

    std::vector<std::size_t> assign(n);
    std::vector<std::size_t> counts(L);
    for (std::size_t it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            assign[i] = nearest_center(points, i, centers, L, nullptr);
        }
        Tensor sums({L, d});
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            counts[assign[i]]++;
            for (std::size_t p = 0; p < d; ++p) sums.at(assign[i], p) += points.at(i, p);
        }
        for (std::size_t j = 0; j < L; ++j) {
            if (counts[j] == 0) {
                // Re-seed to the point farthest from its current center.
                double worst = -1.0;
                std::size_t far = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    double dd = squared_distance(points.row(i), centers.row(assign[i]));
                    if (dd > worst) {
                        worst = dd;
                        far = i;
                    }
                }
                set_center(j, far);
            } else {
                for (std::size_t p = 0; p < d; ++p) {
                    centers.at(j, p) = sums.at(j, p) / static_cast<double>(counts[j]);
                }
            }
        }
    }
    return centers;
}

}  // namespace varnet::numkit

#include "varnet/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace varnet::neighbors {

NeighborGraph build_knn(const Tensor& X, std::size_t k) {
    std::size_t n = X.rows();
    if (X.rank() != 2 || n == 0) throw std::invalid_argument("build_knn: X must be [N x D]");
    if (k < 1 || k > n) {
        throw std::invalid_argument("build_knn: k must satisfy 1 <= k <= N (got k=" +
                                    std::to_string(k) + ", N=" + std::to_string(n) + ")");
    }
    NeighborGraph g;
    g.k = k;
    g.n = n;
    g.indices.resize(n * k);

    std::vector<std::pair<double, std::uint32_t>> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d[j] = {numkit::squared_distance(X.row(i), X.row(j)), static_cast<std::uint32_t>(j)};
        }
        // Self distance is exactly 0; force it to sort first regardless of
        // duplicate points, per the self-inclusion convention.
        d[i].first = -1.0;
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first < b.first;
                              return a.second < b.second;
                          });
        for (std::size_t j = 0; j < k; ++j) g.indices[i * k + j] = d[j].second;
    }
    return g;
}

std::vector<std::uint32_t> reverse_membership_counts(const NeighborGraph& g) {
    std::vector<std::uint32_t> counts(g.n, 0);
    for (std::uint32_t idx : g.indices) {
        if (idx >= g.n) {
            throw std::invalid_argument("reverse_membership_counts: index out of range");
        }
        counts[idx]++;
    }
    return counts;
}

double min_center_distance(std::span<const double> x, const Tensor& centers) {
    if (centers.rows() == 0) throw std::invalid_argument("min_center_distance: no centers");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.rows(); ++j) {
        best = std::min(best, numkit::squared_distance(x, centers.row(j)));
    }
    return std::sqrt(best);
}

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("load_graph: truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void save_graph(const std::string& path, const NeighborGraph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_graph: cannot open '" + path + "'");
    put_u32(out, static_cast<std::uint32_t>(g.n));
    put_u32(out, static_cast<std::uint32_t>(g.k));
    for (std::uint32_t idx : g.indices) put_u32(out, idx);
}

NeighborGraph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_graph: cannot open '" + path + "'");
    NeighborGraph g;
    g.n = get_u32(in);
    g.k = get_u32(in);
    g.indices.resize(g.n * g.k);
    for (auto& idx : g.indices) idx = get_u32(in);
    return g;
}

std::uint64_t graph_cache_key(const Tensor& X, std::size_t k) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const unsigned char* p, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    std::uint64_t kk = k;
    mix(reinterpret_cast<const unsigned char*>(&kk), sizeof kk);
    std::uint64_t rows = X.rows(), cols = X.cols();
    mix(reinterpret_cast<const unsigned char*>(&rows), sizeof rows);
    mix(reinterpret_cast<const unsigned char*>(&cols), sizeof cols);
    mix(reinterpret_cast<const unsigned char*>(X.values().data()),
        X.values().size() * sizeof(double));
    return h;
}

}  // namespace varnet::neighbors

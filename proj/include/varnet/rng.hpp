#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace varnet::numkit {

// Seeded random source. All distributions are implemented on top of the raw
// mt19937_64 stream (std:: distribution objects are implementation-defined,
// which would break cross-platform reproducibility of traces and tests).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1).
    double u01() {
        // 53 random mantissa bits.
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Standard normal via Box-Muller; the sine partner is discarded so that
    // every draw consumes exactly two engine words.
    double normal() {
        double u1 = u01();
        while (u1 <= 0.0) u1 = u01();
        double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return u01() < p; }

    // k distinct indices drawn uniformly from [0, n), in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape);

    std::uint64_t next_raw() { return engine_(); }

    // Derive an independent stream (e.g. one per repeat of an experiment).
    Rng split() { return Rng(engine_() ^ 0x9e3779b97f4a7c15ULL); }

private:
    std::mt19937_64 engine_;
};

}  // namespace varnet::numkit

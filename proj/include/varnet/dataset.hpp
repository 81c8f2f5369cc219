#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varnet/rng.hpp"
#include "varnet/tensor.hpp"

namespace varnet::datasets {

using numkit::Rng;
using numkit::Tensor;

struct Dataset {
    Tensor X;                            // [N x D]
    Tensor y;                            // [N]
    std::optional<Tensor> true_variance; // [N], calibration ground truth
    std::string name;

    std::size_t size() const { return y.size(); }
    std::size_t dim() const { return X.cols(); }
    Dataset subset(const std::vector<std::size_t>& indices) const;
};

// Per-column standardization fitted on a training split. Standard
// deviations use the sample (N-1) convention; constant columns get std 1.
struct Scaler {
    std::vector<double> x_mean, x_std;
    double y_mean = 0.0, y_std = 1.0;

    Tensor apply_x(const Tensor& X) const;
    Tensor invert_x(const Tensor& X) const;
    std::vector<double> apply_y(const std::vector<double>& y) const;
    double apply_y(double y) const { return (y - y_mean) / y_std; }
    double invert_y(double y) const { return y * y_std + y_mean; }
    double scale_variance_to_original(double var_std) const { return var_std * y_std * y_std; }
};

Scaler fit_standardizer(const Dataset& train);
Dataset apply_standardizer(const Scaler& s, const Dataset& ds);

// CSV ingestion: comma separated, '.' decimal point, optional single header
// line. With a header the target is named; without one it is a 0-based
// column index. Errors carry 1-based row/column positions.
Dataset load_csv(const std::string& path, const std::string& target_column, bool has_header);
void write_csv(const std::string& path, const Dataset& ds,
               const std::vector<std::string>& feature_names = {},
               const std::string& target_name = "y");

// y = x sin(x) + 0.3 e1 + 0.3 x e2 with x ~ U[0,10]; heteroscedastic by
// construction. `noise` disables the e-terms for exact checks.
Dataset gen_toy_sine(std::size_t n, Rng& rng, bool noise = true);

// One two-moon draw with all randomness supplied by the caller:
// branch u in {0,1}, angle a1, jitter angle a2, jitter radius u01.
std::pair<double, double> two_moon_point(bool upper, double a1, double a2, double u01);

// N latent points from the two-moon sampler.
Tensor gen_two_moons(std::size_t n, Rng& rng);

// The 4-D observation map; each output dimension gets its own standard
// normal noise scaled by the stated heteroscedastic std. `noise=false`
// evaluates the deterministic polynomial map.
Tensor map_two_moons_4d(const Tensor& Z, Rng& rng, bool noise = true);
// Noise std of output dim j at latent z (the closed forms used above).
double two_moon_noise_std(std::size_t j, double z1, double z2);

struct TwoMoonLatent {
    Tensor Z;  // [N x 2]
    Tensor V;  // [N x 4]
};
TwoMoonLatent gen_two_moon_4d(std::size_t n, Rng& rng);

// One key (feature row) observed repeatedly; calibration ground truth is
// the unbiased sample variance over the replicates.
struct CalibrationRecord {
    std::vector<double> feature;
    std::vector<double> replicates;
};

// per_replicate_rows=false: one row per key with y = replicate mean.
// per_replicate_rows=true: one row per replicate (for training), each row
// carrying its key's variance. Keys need >= 2 replicates.
Dataset build_calibration_dataset(const std::vector<CalibrationRecord>& records,
                                  bool per_replicate_rows = false);

// Seasonal temperature stand-in with known per-day variance:
// mean(d) = 10 sin(2 pi d/365), std(d) = 2 + 1.5 sin(4 pi d/365).
std::vector<CalibrationRecord> gen_seasonal_records(std::size_t days, std::size_t years, Rng& rng);
double seasonal_true_variance(double day);

// Shuffled disjoint partition; sizes round(f*N) with the remainder going to
// the last part when the fractions sum to one. Throws if any part is empty.
std::vector<Dataset> split_dataset(const Dataset& ds, const std::vector<double>& fractions,
                                   Rng& rng);

}  // namespace varnet::datasets

#include "varnet/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace varnet::datasets {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    std::size_t d = dim();
    Dataset out;
    out.X = Tensor({indices.size(), d});
    out.y = Tensor({indices.size()});
    if (true_variance) out.true_variance = Tensor({indices.size()});
    out.name = name;
    for (std::size_t r = 0; r < indices.size(); ++r) {
        std::size_t i = indices[r];
        if (i >= size()) throw std::out_of_range("Dataset::subset: index out of range");
        for (std::size_t c = 0; c < d; ++c) out.X.at(r, c) = X.at(i, c);
        out.y[r] = y[i];
        if (true_variance) (*out.true_variance)[r] = (*true_variance)[i];
    }
    return out;
}

Scaler fit_standardizer(const Dataset& train) {
    std::size_t n = train.size(), d = train.dim();
    if (n < 2) throw std::invalid_argument("fit_standardizer: need at least 2 rows");
    Scaler s;
    s.x_mean.assign(d, 0.0);
    s.x_std.assign(d, 1.0);
    for (std::size_t c = 0; c < d; ++c) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += train.X.at(i, c);
        m /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = train.X.at(i, c) - m;
            ss += r * r;
        }
        double sd = std::sqrt(ss / static_cast<double>(n - 1));
        s.x_mean[c] = m;
        s.x_std[c] = sd > 0.0 ? sd : 1.0;
    }
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += train.y[i];
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = train.y[i] - m;
        ss += r * r;
    }
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    s.y_mean = m;
    s.y_std = sd > 0.0 ? sd : 1.0;
    return s;
}

Tensor Scaler::apply_x(const Tensor& X) const {
    Tensor out = X;
    std::size_t d = X.cols();
    if (d != x_mean.size()) throw std::invalid_argument("Scaler: dimension mismatch");
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            out.at(i, c) = (X.at(i, c) - x_mean[c]) / x_std[c];
        }
    }
    return out;
}

Tensor Scaler::invert_x(const Tensor& X) const {
    Tensor out = X;
    std::size_t d = X.cols();
    if (d != x_mean.size()) throw std::invalid_argument("Scaler: dimension mismatch");
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            out.at(i, c) = X.at(i, c) * x_std[c] + x_mean[c];
        }
    }
    return out;
}

std::vector<double> Scaler::apply_y(const std::vector<double>& y) const {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = apply_y(y[i]);
    return out;
}

Dataset apply_standardizer(const Scaler& s, const Dataset& ds) {
    Dataset out = ds;
    out.X = s.apply_x(ds.X);
    for (std::size_t i = 0; i < ds.size(); ++i) out.y[i] = s.apply_y(ds.y[i]);
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || b == e) {
        throw std::runtime_error("load_csv: non-numeric cell '" + cell + "' at row " +
                                 std::to_string(row) + ", column " + std::to_string(col));
    }
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column, bool has_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t ncols = 0;
    std::size_t target_idx = 0;
    bool target_set = false;

    if (has_header) {
        if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file '" + path + "'");
        ++lineno;
        auto cells = split_line(line);
        ncols = cells.size();
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (strip_quotes(cells[c]) == target_column) {
                target_idx = c;
                target_set = true;
            }
        }
        if (!target_set) {
            throw std::runtime_error("load_csv: target column '" + target_column +
                                     "' not found in header of '" + path + "'");
        }
    }

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (ncols == 0) {
            ncols = cells.size();
            if (!has_header) {
                // Target given as a 0-based column index.
                try {
                    target_idx = static_cast<std::size_t>(std::stoul(target_column));
                } catch (...) {
                    throw std::runtime_error(
                        "load_csv: headerless file needs a numeric target index, got '" +
                        target_column + "'");
                }
                if (target_idx >= ncols) {
                    throw std::runtime_error("load_csv: target index " + target_column +
                                             " out of range for " + std::to_string(ncols) +
                                             " columns");
                }
                target_set = true;
            }
        }
        if (cells.size() != ncols) {
            throw std::runtime_error("load_csv: row " + std::to_string(lineno) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(ncols));
        }
        std::vector<double> vals(ncols);
        for (std::size_t c = 0; c < ncols; ++c) vals[c] = parse_cell(cells[c], lineno, c + 1);
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error("load_csv: no data rows in '" + path + "'");
    if (ncols < 2) throw std::runtime_error("load_csv: need at least one feature and one target");

    std::size_t n = rows.size(), d = ncols - 1;
    Dataset ds;
    ds.name = path;
    ds.X = Tensor({n, d});
    ds.y = Tensor({n});
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t fc = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (c == target_idx) {
                ds.y[i] = rows[i][c];
            } else {
                ds.X.at(i, fc++) = rows[i][c];
            }
        }
    }
    return ds;
}

void write_csv(const std::string& path, const Dataset& ds,
               const std::vector<std::string>& feature_names, const std::string& target_name) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
    std::size_t d = ds.dim();
    for (std::size_t c = 0; c < d; ++c) {
        if (c < feature_names.size()) {
            out << feature_names[c];
        } else {
            out << 'x' << c;
        }
        out << ',';
    }
    out << target_name << '\n';
    char buf[40];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.X.at(i, c));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", ds.y[i]);
        out << buf << '\n';
    }
}

Dataset gen_toy_sine(std::size_t n, Rng& rng, bool noise) {
    if (n < 1) throw std::invalid_argument("gen_toy_sine: n must be positive");
    Dataset ds;
    ds.name = "toy-sine";
    ds.X = Tensor({n, 1});
    ds.y = Tensor({n});
    for (std::size_t i = 0; i < n; ++i) {
        double x = rng.uniform(0.0, 10.0);
        double e1 = noise ? rng.normal() : 0.0;
        double e2 = noise ? rng.normal() : 0.0;
        ds.X.at(i, 0) = x;
        ds.y[i] = x * std::sin(x) + 0.3 * e1 + 0.3 * x * e2;
    }
    return ds;
}

std::pair<double, double> two_moon_point(bool upper, double a1, double a2, double u01) {
    double cx = upper ? 0.5 : -0.5;
    double z1 = cx + std::cos(a1) + (u01 / 4.0) * std::cos(a2);
    double z2 = std::sin(a1) + (u01 / 4.0) * std::sin(a2);
    return {z1, z2};
}

Tensor gen_two_moons(std::size_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("gen_two_moons: n must be positive");
    Tensor Z({n, 2});
    for (std::size_t i = 0; i < n; ++i) {
        bool upper = rng.bernoulli(0.5);
        double a1 = upper ? rng.uniform(0.0, kPi) : rng.uniform(kPi, 2.0 * kPi);
        double a2 = rng.uniform(0.0, 2.0 * kPi);
        double u = rng.u01();
        auto [z1, z2] = two_moon_point(upper, a1, a2, u);
        Z.at(i, 0) = z1;
        Z.at(i, 1) = z2;
    }
    return Z;
}

double two_moon_noise_std(std::size_t j, double z1, double z2) {
    double norm = std::sqrt(z1 * z1 + z2 * z2);
    switch (j) {
        case 0: return std::sqrt(0.03 + 0.05 * (3.0 + z1));
        case 1: return std::sqrt(0.03 + 0.03 * norm);
        case 2: return std::sqrt(0.03 + 0.05 * norm);
        case 3: return std::sqrt(0.03 + 0.03 / (0.2 + norm));
        default: throw std::out_of_range("two_moon_noise_std: j must be in [0,4)");
    }
}

Tensor map_two_moons_4d(const Tensor& Z, Rng& rng, bool noise) {
    if (Z.rank() != 2 || Z.cols() != 2) {
        throw std::invalid_argument("map_two_moons_4d: Z must have 2 columns");
    }
    std::size_t n = Z.rows();
    Tensor V({n, 4});
    for (std::size_t i = 0; i < n; ++i) {
        double z1 = Z.at(i, 0), z2 = Z.at(i, 1);
        double base[4] = {
            z1 - z2,
            z1 * z1 + 0.5 * z2,
            z1 * z2 - z1,
            z1 + z2,
        };
        for (std::size_t j = 0; j < 4; ++j) {
            double e = noise ? rng.normal() : 0.0;
            V.at(i, j) = base[j] + e * two_moon_noise_std(j, z1, z2);
        }
    }
    return V;
}

TwoMoonLatent gen_two_moon_4d(std::size_t n, Rng& rng) {
    TwoMoonLatent out;
    out.Z = gen_two_moons(n, rng);
    out.V = map_two_moons_4d(out.Z, rng);
    return out;
}

Dataset build_calibration_dataset(const std::vector<CalibrationRecord>& records,
                                  bool per_replicate_rows) {
    if (records.empty()) throw std::invalid_argument("build_calibration_dataset: no records");
    std::size_t d = records.front().feature.size();
    std::size_t rows = 0;
    for (const auto& r : records) {
        if (r.feature.size() != d) {
            throw std::invalid_argument("build_calibration_dataset: inconsistent feature dims");
        }
        if (r.replicates.size() < 2) {
            throw std::invalid_argument(
                "build_calibration_dataset: every key needs >= 2 replicates");
        }
        rows += per_replicate_rows ? r.replicates.size() : 1;
    }
    Dataset ds;
    ds.name = "calibration";
    ds.X = Tensor({rows, d});
    ds.y = Tensor({rows});
    ds.true_variance = Tensor({rows});
    std::size_t r = 0;
    for (const auto& rec : records) {
        double m = 0.0;
        for (double v : rec.replicates) m += v;
        m /= static_cast<double>(rec.replicates.size());
        double ss = 0.0;
        for (double v : rec.replicates) ss += (v - m) * (v - m);
        double var = ss / static_cast<double>(rec.replicates.size() - 1);
        if (per_replicate_rows) {
            for (double v : rec.replicates) {
                for (std::size_t c = 0; c < d; ++c) ds.X.at(r, c) = rec.feature[c];
                ds.y[r] = v;
                (*ds.true_variance)[r] = var;
                ++r;
            }
        } else {
            for (std::size_t c = 0; c < d; ++c) ds.X.at(r, c) = rec.feature[c];
            ds.y[r] = m;
            (*ds.true_variance)[r] = var;
            ++r;
        }
    }
    return ds;
}

std::vector<CalibrationRecord> gen_seasonal_records(std::size_t days, std::size_t years, Rng& rng) {
    if (days < 2 || years < 2) {
        throw std::invalid_argument("gen_seasonal_records: need >= 2 days and >= 2 years");
    }
    std::vector<CalibrationRecord> recs(days);
    for (std::size_t d = 0; d < days; ++d) {
        double day = 365.0 * static_cast<double>(d) / static_cast<double>(days);
        double mean = 10.0 * std::sin(2.0 * kPi * day / 365.0);
        double sd = std::sqrt(seasonal_true_variance(day));
        recs[d].feature = {day};
        recs[d].replicates.resize(years);
        for (std::size_t yy = 0; yy < years; ++yy) {
            recs[d].replicates[yy] = mean + sd * rng.normal();
        }
    }
    return recs;
}

double seasonal_true_variance(double day) {
    double sd = 2.0 + 1.5 * std::sin(4.0 * kPi * day / 365.0);
    return sd * sd;
}

std::vector<Dataset> split_dataset(const Dataset& ds, const std::vector<double>& fractions,
                                   Rng& rng) {
    if (fractions.empty()) throw std::invalid_argument("split_dataset: no fractions");
    double total = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) throw std::invalid_argument("split_dataset: fractions must be positive");
        total += f;
    }
    if (total > 1.0 + 1e-9) throw std::invalid_argument("split_dataset: fractions sum above 1");

    std::size_t n = ds.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);

    std::vector<std::size_t> sizes(fractions.size());
    std::size_t used = 0;
    for (std::size_t p = 0; p < fractions.size(); ++p) {
        if (p + 1 == fractions.size() && std::abs(total - 1.0) <= 1e-9) {
            sizes[p] = n - used;  // remainder goes to the last part
        } else {
            sizes[p] =
                static_cast<std::size_t>(std::llround(fractions[p] * static_cast<double>(n)));
        }
        used += sizes[p];
    }
    if (used > n) throw std::invalid_argument("split_dataset: rounded sizes exceed N");
    std::vector<Dataset> parts;
    std::size_t at = 0;
    for (std::size_t p = 0; p < sizes.size(); ++p) {
        if (sizes[p] == 0) {
            throw std::invalid_argument("split_dataset: part " + std::to_string(p) + " is empty");
        }
        std::vector<std::size_t> idx(order.begin() + at, order.begin() + at + sizes[p]);
        at += sizes[p];
        parts.push_back(ds.subset(idx));
    }
    return parts;
}

}  // namespace varnet::datasets

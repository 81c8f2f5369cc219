#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "varnet/autodiff.hpp"
#include "varnet/likelihood.hpp"
#include "varnet/optim.hpp"
#include "varnet/rng.hpp"

using namespace varnet::likelihood;
namespace nk = varnet::numkit;

TEST_CASE("gaussian NLL of the standard normal mode") {
    CHECK(gaussian_nll(0.0, {0.0, 1.0}) == doctest::Approx(0.9189385332).epsilon(1e-9));
}

TEST_CASE("gaussian NLL is symmetric about the mean") {
    GaussianParams p{1.3, 0.7};
    CHECK(gaussian_nll(1.3 + 0.9, p) == doctest::Approx(gaussian_nll(1.3 - 0.9, p)).epsilon(1e-15));
}

TEST_CASE("gaussian NLL rejects non-positive variance") {
    CHECK_THROWS(gaussian_nll(0.0, {0.0, 0.0}));
    CHECK_THROWS(gaussian_nll(0.0, {0.0, -1.0}));
}

TEST_CASE("gaussian NLL vs a directly coded density") {
    nk::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        double y = rng.normal() * 3.0;
        double mu = rng.normal();
        double var = 0.05 + 3.0 * rng.u01();
        double dens = std::exp(-(y - mu) * (y - mu) / (2 * var)) / std::sqrt(2 * M_PI * var);
        CHECK(gaussian_nll(y, {mu, var}) == doctest::Approx(-std::log(dens)).epsilon(1e-12));
    }
}

TEST_CASE("gaussian NLL is minimized over var at the squared residual") {
    double y = 2.0, mu = 0.5;
    double opt = (y - mu) * (y - mu);
    double at_opt = gaussian_nll(y, {mu, opt});
    for (double f : {0.5, 0.9, 1.1, 2.0}) {
        CHECK(at_opt < gaussian_nll(y, {mu, opt * f}));
    }
}

TEST_CASE("student-t NLL analytic point") {
    // y=mu, alpha=beta=1: density Gamma(1.5)/(Gamma(1) sqrt(2 pi)) = 1/(2 sqrt(2)).
    CHECK(student_t_nll(0.0, {0.0, 1.0, 1.0}) ==
          doctest::Approx(std::log(2.0 * std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("student-t NLL symmetry") {
    NIGParams p{-0.4, 2.3, 0.9};
    CHECK(student_t_nll(-0.4 + 1.7, p) == doctest::Approx(student_t_nll(-0.4 - 1.7, p)).epsilon(1e-15));
}

TEST_CASE("student-t NLL rejects bad parameters") {
    CHECK_THROWS(student_t_nll(0.0, {0.0, 0.0, 1.0}));
    CHECK_THROWS(student_t_nll(0.0, {0.0, 1.0, -2.0}));
}

TEST_CASE("student-t NLL matches the quadrature oracle") {
    nk::Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        double mu = rng.normal() * 2.0;
        double y = mu + rng.normal() * 4.0;
        double alpha = 0.5 + 49.5 * rng.u01();
        double beta = 0.1 + 49.9 * rng.u01();
        double closed = -student_t_nll(y, {mu, alpha, beta});
        double oracle = marginal_log_density_oracle(y, mu, alpha, beta);
        CHECK(std::abs(closed - oracle) < 1e-6);
    }
}

TEST_CASE("student-t NLL approaches gaussian NLL for large alpha") {
    double y = 1.7, mu = 0.4, var = 0.8;
    double alpha = 1e6;
    double t = student_t_nll(y, {mu, alpha, alpha * var});
    double g = gaussian_nll(y, {mu, var});
    CHECK(std::abs(t - g) < 1e-4);
}

TEST_CASE("nig_mean_variance basics") {
    CHECK(nig_mean_variance(2.0, 3.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS(nig_mean_variance(1.0, 3.0));
    CHECK_THROWS(nig_mean_variance(0.5, 3.0));
}

TEST_CASE("nig_mean_variance vs inverse-gamma sampling") {
    // sigma^2 = beta / Gamma(alpha,1); alpha=3, beta=2 has mean 1, and the
    // estimator's variance is Var(IG)/n = 1/n for these parameters.
    nk::Rng rng(23);
    const int n = 1000000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += 2.0 / rng.gamma(3.0);
    double mc = s / n;
    double se = 1.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mc - nig_mean_variance(3.0, 2.0)) < 3.0 * se);
}

TEST_CASE("marginal density oracle matches closed form at analytic point") {
    double dens = marginal_density_oracle(0.0, 0.0, 1.0, 1.0);
    CHECK(std::abs(dens - 1.0 / (2.0 * std::sqrt(2.0))) < 1e-8 * dens);
}

TEST_CASE("marginal density integrates to one over y") {
    for (auto [alpha, beta] : {std::pair{1.0, 1.0}, std::pair{3.5, 0.6}, std::pair{0.7, 2.0}}) {
        double mu = 0.3;
        // Substitute y = mu + sinh(s) to compress the polynomial tails.
        auto f = [&](double s) {
            double c = std::cosh(s);
            return marginal_density_oracle(mu + std::sinh(s), mu, alpha, beta) * c;
        };
        double total = adaptive_simpson(f, -22.0, 22.0, 1e-8);
        CHECK(std::abs(total - 1.0) < 1e-6);
    }
}

TEST_CASE("marginal density decreases away from the mode") {
    double prev = marginal_density_oracle(0.5, 0.5, 2.0, 1.5);
    for (double d : {0.3, 0.8, 1.5, 3.0, 6.0}) {
        double cur = marginal_density_oracle(0.5 + d, 0.5, 2.0, 1.5);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("NLL gradients pass finite differences") {
    // Scalar graphs through the same primitives the trainers use.
    nk::Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        nk::Tensor mu = nk::Tensor::scalar(rng.normal());
        nk::Tensor raw_a = nk::Tensor::scalar(rng.normal());
        nk::Tensor raw_b = nk::Tensor::scalar(rng.normal());
        double y = rng.normal() * 2.0;
        std::vector<nk::Tensor*> params{&mu, &raw_a, &raw_b};
        auto loss = [&](nk::ad::Tape& t, std::span<const nk::ad::Var> v) {
            nk::ad::Var alpha = t.softplus(v[1]) + 1.0;
            nk::ad::Var beta = t.softplus(v[2]) + 1e-6;
            nk::ad::Var r = t.constant_scalar(y) - v[0];
            nk::ad::Var nll = -alpha * t.log(beta) - t.lgamma(alpha + 0.5) + t.lgamma(alpha) +
                              0.9189385332046727 + (alpha + 0.5) * t.log(beta + 0.5 * t.square(r));
            return nll;
        };
        auto res = nk::finite_diff_check(loss, params, 1e-5);
        CHECK(res.max_rel_err < 1e-5);
    }
}

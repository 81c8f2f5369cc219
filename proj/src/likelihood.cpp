#include "varnet/likelihood.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace varnet::likelihood {

namespace {
constexpr double kHalfLog2Pi = 0.9189385332046727418;
}  // namespace

double gaussian_nll(double y, const GaussianParams& p) {
    if (!(p.var > 0.0)) throw std::invalid_argument("gaussian_nll: variance must be positive");
    double r = y - p.mu;
    return 0.5 * std::log(2.0 * 3.14159265358979323846 * p.var) + r * r / (2.0 * p.var);
}

double student_t_nll(double y, const NIGParams& p) {
    if (!(p.alpha > 0.0) || !(p.beta > 0.0)) {
        throw std::invalid_argument("student_t_nll: alpha and beta must be positive");
    }
    double r = y - p.mu;
    return -p.alpha * std::log(p.beta) - std::lgamma(p.alpha + 0.5) + std::lgamma(p.alpha) +
           kHalfLog2Pi + (p.alpha + 0.5) * std::log(p.beta + 0.5 * r * r);
}

double nig_mean_variance(double alpha, double beta) {
    if (!(alpha > 1.0)) {
        throw std::invalid_argument("nig_mean_variance: mean of Inv-Gamma requires alpha > 1");
    }
    return beta / (alpha - 1.0);
}

namespace {

struct SimpsonState {
    const std::function<double(double)>* f;
    double rel_tol;
    int max_depth;
    bool converged = true;
};

double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                   double whole, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = (*st.f)(lm), frm = (*st.f)(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    double scale = std::max(std::abs(left + right), 1e-300);
    if (std::abs(delta) <= 15.0 * st.rel_tol * scale || (b - a) < 1e-14 * (std::abs(a) + 1.0)) {
        return left + right + delta / 15.0;
    }
    if (depth >= st.max_depth) {
        st.converged = false;
        return left + right + delta / 15.0;
    }
    return simpson_rec(st, a, m, fa, flm, fm, left, depth + 1) +
           simpson_rec(st, m, b, fm, frm, fb, right, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
    SimpsonState st{&f, rel_tol, max_depth, true};
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double result = simpson_rec(st, a, b, fa, fm, fb, whole, 0);
    if (!st.converged) {
        throw std::runtime_error("adaptive_simpson: requested tolerance not reached");
    }
    return result;
}

double marginal_log_density_oracle(double y, double mu, double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw std::invalid_argument("marginal density oracle: alpha and beta must be positive");
    }
    double r = y - mu;
    double rate = beta + 0.5 * r * r;

    // With tau = 1/sigma^2 the integrand becomes
    //   sqrt(tau/2pi) exp(-tau r^2/2) * beta^alpha/Gamma(alpha) tau^(alpha-1) exp(-beta tau).
    // Integrating in u = log(tau) keeps the peak O(1) wide for all alpha.
    double c0 = alpha * std::log(beta) - std::lgamma(alpha) - kHalfLog2Pi;
    double p = alpha + 0.5;  // exponent of tau after the du Jacobian
    auto log_integrand = [&](double u) { return c0 + p * u - rate * std::exp(u); };

    double u_star = std::log(p / rate);  // stationary point of p*u - rate*e^u
    double peak = log_integrand(u_star);
    // Left tail decays like exp(p*(u-u_star)); the right tail superexponentially.
    double left = u_star - (50.0 / p + 5.0);
    double right = u_star + 6.0;

    auto f = [&](double u) { return std::exp(log_integrand(u) - peak); };
    double integral = adaptive_simpson(f, left, right, 1e-9);
    if (!(integral > 0.0) || !std::isfinite(integral)) {
        throw std::runtime_error("marginal density oracle: quadrature failed");
    }
    return peak + std::log(integral);
}

double marginal_density_oracle(double y, double mu, double alpha, double beta) {
    return std::exp(marginal_log_density_oracle(y, mu, alpha, beta));
}

}  // namespace varnet::likelihood

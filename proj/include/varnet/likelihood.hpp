#pragma once

#include <functional>

#include "varnet/tensor.hpp"

namespace varnet::likelihood {

// Lower bound applied to every predicted variance; estimation is ill-posed
// without one.
inline constexpr double kVarianceFloor = 1e-6;

struct GaussianParams {
    double mu = 0.0;
    double var = 1.0;  // sigma^2 > 0
};

// Parameters of the predictive distribution when sigma^2 ~ Inv-Gamma(alpha,
// beta): the marginal over y is a located-scaled Student-t with 2*alpha
// degrees of freedom. The mean of sigma^2 exists only for alpha > 1.
struct NIGParams {
    double mu = 0.0;
    double alpha = 2.0;  // shape, > 0
    double beta = 1.0;   // scale, > 0
};

// 0.5*log(2*pi*var) + (y-mu)^2/(2*var). Throws when var <= 0.
double gaussian_nll(double y, const GaussianParams& p);

// Negative log of  beta^alpha Gamma(alpha+1/2) /
//                  (Gamma(alpha) sqrt(2 pi) (beta + (y-mu)^2/2)^(alpha+1/2)).
double student_t_nll(double y, const NIGParams& p);

// Mean of Inv-Gamma(alpha, beta): beta/(alpha-1). Throws for alpha <= 1.
double nig_mean_variance(double alpha, double beta);

// Numerical evaluation of  int N(y|mu,s) InvGamma(s|alpha,beta) ds  by
// adaptive quadrature after substituting tau = 1/s (which turns the
// integrand into a well-behaved gamma-type integral). Relative tolerance
// 1e-9; throws if the subdivision limit is reached first.
double marginal_density_oracle(double y, double mu, double alpha, double beta);
// Same integral, returned in log space (usable when the density underflows).
double marginal_log_density_oracle(double y, double mu, double alpha, double beta);

// Generic 1-D adaptive Simpson quadrature (exposed for test oracles).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth = 60);

}  // namespace varnet::likelihood

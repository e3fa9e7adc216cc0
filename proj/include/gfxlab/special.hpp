#pragma once

#include <cmath>

namespace gfx {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double cauchy_cdf(double x, double loc = 0.0, double scale = 1.0) {
    return 0.5 + std::atan((x - loc) / scale) / M_PI;
}

inline double exponential_cdf(double x, double rate) {
    return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x);
}

/// Regularized lower incomplete gamma P(a,x); series for x < a+1, Lentz
/// continued fraction otherwise.
double gamma_p(double a, double x);
inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

inline double chi2_cdf(double x, double dof) { return gamma_p(0.5 * dof, 0.5 * x); }

/// Quantile of the chi-square distribution (bisection on the cdf).
double chi2_quantile(double p, double dof);

/// Asymptotic Kolmogorov tail: P(sqrt(n) D > t) = 2 sum (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorov_q(double t);

/// Quantile of Gamma(shape, rate) by bisection on the regularized cdf.
double gamma_quantile(double shape, double rate, double p);

/// E |Z|^3 for Z ~ N(mu e1, sigma^2 I) in R^2: the third absolute moment of
/// a noncentered planar Gaussian, via the Kummer function
/// 2^{3/2} Gamma(5/2) sigma^3 M(-3/2, 1, -mu^2/(2 sigma^2)).
double gaussian2d_abs_moment3(double mu, double sigma);

} // namespace gfx

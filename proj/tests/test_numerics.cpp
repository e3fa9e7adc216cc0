#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "gfxlab/quadrature.hpp"
#include "gfxlab/rng.hpp"
#include "gfxlab/special.hpp"

using namespace gfx;

TEST_CASE("adaptive quadrature on analytic integrals") {
    auto r = integrate([](double x) { return std::exp(-x * x); }, 0.0, 10.0, 1e-13);
    CHECK(std::abs(r.value - 0.5 * std::sqrt(M_PI)) < 1e-12);

    auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, {1e-12, 1e-6, 1e-3, 1.0}, 1e-11);
    CHECK(std::abs(s.value - 2.0) < 1e-5);
}

TEST_CASE("upper-infinite transform reproduces gamma integrals") {
    // int_0^inf t^{2} e^{-t} dt = 2
    auto r = integrate_upper_infinite([](double t) { return t * t * std::exp(-t); }, 0.0, 1e-13);
    CHECK(std::abs(r.value - 2.0) < 1e-10);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
    GaussLegendre gl(16);
    const double v = gl.apply([](double x) { return x * x * x * x; }, -1.0, 1.0);
    CHECK(std::abs(v - 0.4) < 1e-14);
    const double w = gl.apply([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(std::abs(w - 2.0) < 1e-13);
}

TEST_CASE("incomplete gamma and chi2 quantile") {
    // P(1, x) = 1 - e^{-x}
    CHECK(std::abs(gamma_p(1.0, 0.7) - (1.0 - std::exp(-0.7))) < 1e-13);
    // chi2 with 2 dof: cdf = 1 - e^{-x/2}; quantile(0.999) = -2 ln(0.001)
    CHECK(std::abs(chi2_quantile(0.999, 2.0) - (-2.0 * std::log(0.001))) < 1e-8);
    // round trip at a few dofs
    for (double dof : {1.0, 5.0, 49.0}) {
        const double q = chi2_quantile(0.999, dof);
        CHECK(std::abs(chi2_cdf(q, dof) - 0.999) < 1e-10);
    }
}

TEST_CASE("kolmogorov tail at its 0.001 critical point") {
    CHECK(std::abs(kolmogorov_q(1.949) - 0.001) < 1e-4);
    CHECK(kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("bisection root finder") {
    const double r = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
    CHECK(std::abs(r - std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("gamma quantile inverts the cdf") {
    for (double p : {0.01, 0.5, 0.99, 0.9999}) {
        const double x = gamma_quantile(1.5, 0.5, p);
        CHECK(std::abs(gamma_p(1.5, 0.5 * x) - p) < 1e-11);
    }
}

TEST_CASE("third absolute moment of a noncentered planar gaussian") {
    // centered closed form: 2^{3/2} Gamma(5/2) sigma^3
    CHECK(std::abs(gaussian2d_abs_moment3(0.0, 1.0) -
                   std::pow(2.0, 1.5) * std::tgamma(2.5)) < 1e-12);
    // degenerate spread
    CHECK(gaussian2d_abs_moment3(2.0, 0.0) == 8.0);
    // independently computed references on both sides of the series /
    // asymptotic switch at z = 25
    CHECK(std::abs(gaussian2d_abs_moment3(std::sqrt(2.0 * 24.999), 1.0) - 385.5109915084098) <
          1e-5);
    CHECK(std::abs(gaussian2d_abs_moment3(std::sqrt(2.0 * 25.001), 1.0) - 385.5546842773098) <
          1e-5);

    // Monte-Carlo oracle at a few (mu, sigma)
    gfx::RngState rng(777, 0);
    for (const auto& [mu, sig2] : std::vector<std::pair<double, double>>{
             {0.5, 1.0}, {3.0, 0.5}, {12.0, 1.0}}) {
        const int n = 400000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z1 = mu + sig2 * rng.gaussian();
            const double z2 = sig2 * rng.gaussian();
            const double v = std::pow(z1 * z1 + z2 * z2, 1.5);
            s += v;
            s2 += v * v;
        }
        const double mean = s / n;
        const double se = std::sqrt((s2 / n - mean * mean) / n);
        CHECK(std::abs(gaussian2d_abs_moment3(mu, sig2) - mean) < 3.0 * se);
    }
}

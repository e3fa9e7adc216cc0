#include <doctest.h>

#include <cmath>
#include <vector>

#include "gfxlab/distributions.hpp"
#include "gfxlab/stats.hpp"

using namespace gfx;

TEST_CASE("gaussian moments at 10^6 samples") {
    RngState rng(101, 0);
    const int n = 1000000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_gaussian(rng);
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.004);
    CHECK(var > 0.995);
    CHECK(var < 1.005);
}

TEST_CASE("gamma sampler matches shape/rate mean") {
    RngState rng(102, 0);
    const int n = 100000;

    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[static_cast<std::size_t>(i)] = sample_gamma(rng, 1.0, 2.0);
        b[static_cast<std::size_t>(i)] = sample_gamma(rng, 1.5, 0.5);
    }
    auto ra = mean_ci(a);
    auto rb = mean_ci(b);
    CHECK(std::abs(ra.estimate - 0.5) < 3.0 * ra.std_error);
    CHECK(std::abs(rb.estimate - 3.0) < 3.0 * rb.std_error);

    CHECK_THROWS_AS(sample_gamma(rng, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_gamma(rng, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("uniform sphere: unit norm, symmetric, n=1 signs") {
    RngState rng(103, 0);
    const int n = 100000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        auto v = sample_uniform_sphere(rng, 2);
        const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1]);
        REQUIRE(std::abs(norm - 1.0) < 1e-12);
        s += v[0];
    }
    CHECK(std::abs(s / n) < 3.0 * std::sqrt(0.5 / n));

    int plus = 0;
    for (int i = 0; i < n; ++i) {
        auto v = sample_uniform_sphere(rng, 1);
        REQUIRE(std::abs(std::abs(v[0]) - 1.0) < 1e-15);
        if (v[0] > 0.0) ++plus;
    }
    CHECK(std::abs(plus / static_cast<double>(n) - 0.5) < 3.0 * std::sqrt(0.25 / n));

    CHECK_THROWS_AS(sample_uniform_sphere(rng, 0), std::invalid_argument);
}

TEST_CASE("positive stable sampler against Laplace-transform oracles") {
    RngState rng(104, 0);
    const int n = 200000;

    // index 1/2: sigma is 1/(2 G^2) in law, so E[e^{-sigma}] = e^{-1}
    std::vector<double> lp(n);
    for (int i = 0; i < n; ++i)
        lp[static_cast<std::size_t>(i)] = std::exp(-sample_positive_stable(rng, 0.5, 1.0));
    auto r = mean_ci(lp);
    CHECK(std::abs(r.estimate - std::exp(-1.0)) < 3.0 * r.std_error);

    // oracle against the direct 1/(2 G^2) representation
    std::vector<double> lp2(n);
    for (int i = 0; i < n; ++i) {
        const double g = sample_gaussian(rng);
        lp2[static_cast<std::size_t>(i)] = std::exp(-1.0 / (2.0 * g * g));
    }
    auto r2 = mean_ci(lp2);
    CHECK(std::abs(r.estimate - r2.estimate) < 3.0 * std::hypot(r.std_error, r2.std_error));

    // general index: E[e^{-2 sigma}] = e^{-scale 2^idx}
    std::vector<double> lp3(n);
    for (int i = 0; i < n; ++i)
        lp3[static_cast<std::size_t>(i)] = std::exp(-2.0 * sample_positive_stable(rng, 0.7, 1.0));
    auto r3 = mean_ci(lp3);
    CHECK(std::abs(r3.estimate - std::exp(-std::pow(2.0, 0.7))) < 3.0 * r3.std_error);

    CHECK(sample_positive_stable(rng, 0.3, 0.0) == 0.0);
    CHECK_THROWS_AS(sample_positive_stable(rng, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_positive_stable(rng, 0.0, 1.0), std::invalid_argument);
}

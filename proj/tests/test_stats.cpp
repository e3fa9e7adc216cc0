#include <doctest.h>

#include <cmath>
#include <vector>

#include "gfxlab/distributions.hpp"
#include "gfxlab/special.hpp"
#include "gfxlab/stats.hpp"

using namespace gfx;

TEST_CASE("ks_test calibration and power") {
    RngState rng(201, 0);
    const int n = 100000;
    std::vector<double> gauss(n), cauchy(n);
    for (int i = 0; i < n; ++i) {
        gauss[static_cast<std::size_t>(i)] = sample_gaussian(rng);
        cauchy[static_cast<std::size_t>(i)] = std::tan(M_PI * (rng.uniform() - 0.5));
    }
    CHECK(ks_test(gauss, [](double x) { return normal_cdf(x); }).pass);
    CHECK_FALSE(ks_test(cauchy, [](double x) { return normal_cdf(x); }).pass);
    CHECK_THROWS_AS(ks_test(std::vector<double>(10, 0.5), [](double) { return 0.5; }),
                    std::invalid_argument);
}

TEST_CASE("chi_square_uniform calibration and power") {
    RngState rng(202, 0);
    const int n = 100000;
    std::vector<double> u(n), tri(n);
    for (int i = 0; i < n; ++i) {
        u[static_cast<std::size_t>(i)] = rng.uniform();
        tri[static_cast<std::size_t>(i)] = 0.5 * (rng.uniform() + rng.uniform());
    }
    CHECK(chi_square_uniform(u, 50).pass);
    CHECK_FALSE(chi_square_uniform(tri, 50).pass);
}

TEST_CASE("mean_ci of a constant has zero SE") {
    std::vector<double> c(100, 3.25);
    auto r = mean_ci(c);
    CHECK(r.estimate == 3.25);
    CHECK(r.std_error == 0.0);
    CHECK(r.ci_low == r.ci_high);
}

TEST_CASE("cf_distance calibration and power") {
    RngState rng(203, 0);
    const int n = 20000;
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i) samples[static_cast<std::size_t>(i)] = sample_gaussian(rng);
    auto gauss_cf = [](std::span<const double> u) {
        return std::complex<double>(std::exp(-0.5 * u[0] * u[0]), 0.0);
    };
    std::vector<std::vector<double>> grid = {{0.5}, {1.0}, {2.0}};
    CHECK(cf_distance(samples, 1, gauss_cf, grid).pass);

    auto wrong_cf = [](std::span<const double> u) {
        return std::complex<double>(std::exp(-2.0 * u[0] * u[0]), 0.0);
    };
    CHECK_FALSE(cf_distance(samples, 1, wrong_cf, {{1.0}}).pass);
}

TEST_CASE("two-sample ks and weighted mean") {
    RngState rng(204, 0);
    const int n = 20000;
    std::vector<double> a(n), b(n), w(n);
    for (int i = 0; i < n; ++i) {
        a[static_cast<std::size_t>(i)] = sample_gaussian(rng);
        b[static_cast<std::size_t>(i)] = sample_gaussian(rng);
        w[static_cast<std::size_t>(i)] = rng.uniform();
    }
    CHECK(ks_two_sample(a, b).pass);

    auto r = weighted_mean_ci(a, w);
    CHECK(std::abs(r.estimate) < 3.0 * r.std_error + 1e-12);
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "gfxlab/halfspace.hpp"
#include "gfxlab/special.hpp"
#include "gfxlab/stats.hpp"

using namespace gfx;

namespace {
const std::vector<double> kOrigin2{0.0, 0.0};

HalfSpacePath monotone_path(double slope, double horizon, int steps) {
    HalfSpacePath p;
    std::vector<double> times = uniform_times(horizon, steps);
    std::vector<double> vert(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) vert[i] = slope * times[i];
    std::vector<double> horiz(times.size() * 2, 0.0);
    p.vertical = PathGrid(1, times, std::move(vert));
    p.horizontal = PathGrid(2, std::move(times), std::move(horiz));
    p.start_x = kOrigin2;
    return p;
}
} // namespace

TEST_CASE("free half-space excursion: positivity and second moment") {
    RngState rng(501, 0);
    const int n = 10000;
    std::vector<double> v2(n), incr(n);
    int interior_zero = 0;
    for (int i = 0; i < n; ++i) {
        const HalfSpacePath p = sample_bessel_brownian(rng, 3, kOrigin2, 1.0, 16);
        for (std::size_t j = 1; j < p.vertical.size(); ++j)
            if (p.vertical.scalar(j) <= 0.0) ++interior_zero;
        v2[static_cast<std::size_t>(i)] = p.vertical.scalar(8) * p.vertical.scalar(8);  // t = 1/2
        incr[static_cast<std::size_t>(i)] = p.horizontal.at(16)[0] - p.horizontal.at(0)[0];
    }
    CHECK(interior_zero == 0);
    auto r = mean_ci(v2);
    CHECK(std::abs(r.estimate - 3.0 * 0.5) < 3.0 * r.std_error);
    auto ri = mean_ci(incr);
    CHECK(std::abs(ri.estimate) < 3.0 * ri.std_error + 1e-12);
}

TEST_CASE("last passage on deterministic and random paths") {
    const HalfSpacePath mono = monotone_path(2.0, 1.0, 64);
    CHECK(last_passage(mono, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(last_passage(mono, 0.5) <= last_passage(mono, 1.0));
    CHECK_THROWS_AS(last_passage(mono, 5.0), std::runtime_error);

    // law is stable under grid doubling
    const double a = 0.5;
    const int n = 5000;
    std::vector<double> s1(n), s2(n);
    for (int i = 0; i < n; ++i) {
        RngState ra(502, static_cast<std::uint64_t>(i));
        const HalfSpacePath pa = sample_bessel_brownian_above(ra, 3, kOrigin2, a, 256);
        CrossingRefiner refa{&ra};
        s1[static_cast<std::size_t>(i)] = last_passage(pa, a, refa);
        RngState rb(503, static_cast<std::uint64_t>(i));
        const HalfSpacePath pb = sample_bessel_brownian_above(rb, 3, kOrigin2, a, 512);
        CrossingRefiner refb{&rb};
        s2[static_cast<std::size_t>(i)] = last_passage(pb, a, refb);
    }
    CHECK(ks_two_sample(s1, s2).pass);
}

TEST_CASE("clearance policy delivers a path well above the level") {
    RngState rng(504, 0);
    for (int i = 0; i < 200; ++i) {
        const HalfSpacePath p = sample_bessel_brownian_above(rng, 3, kOrigin2, 0.7, 64);
        CHECK(p.vertical.scalar(p.vertical.size() - 1) > 3.0 * 0.7);
        CHECK(p.horizon() >= 10.0 * 0.7 * 0.7 - 1e-12);
    }
}

TEST_CASE("exact last-passage sampler: duration law and endpoint") {
    RngState rng(505, 0);
    const double a = 0.5;
    const int n = 50000;
    std::vector<double> durations(n), lap(n);
    for (int i = 0; i < n; ++i) {
        const HalfSpacePath p = sample_to_last_passage(rng, 3, kOrigin2, a, 16);
        durations[static_cast<std::size_t>(i)] = p.horizon();
        lap[static_cast<std::size_t>(i)] = std::exp(-p.horizon());
        if (i < 100) CHECK(p.vertical.scalar(p.vertical.size() - 1) == doctest::Approx(a));
    }
    // duration is a^2/G^2: P(T <= t) = 2 Phi(-a/sqrt(t))
    auto t = ks_test(durations, [&](double x) { return 2.0 * normal_cdf(-a / std::sqrt(x)); });
    CHECK(t.pass);
    auto r = mean_ci(lap);
    CHECK(std::abs(r.estimate - std::exp(-a * std::sqrt(2.0))) < 3.0 * r.std_error);
}

TEST_CASE("bessel3 first hit matches its first-passage moments") {
    RngState rng(506, 0);
    const double a = 0.3;
    const int n = 20000;
    std::vector<double> t1(n), t2(n);
    for (int i = 0; i < n; ++i) {
        const double t = bessel3_first_hit(rng, a, 1024);
        t1[static_cast<std::size_t>(i)] = t;
        t2[static_cast<std::size_t>(i)] = t * t;
    }
    auto r1 = mean_ci(t1), r2 = mean_ci(t2);
    CHECK(std::abs(r1.estimate - a * a / 3.0) < 3.0 * r1.std_error);
    CHECK(std::abs(r2.estimate - 7.0 * std::pow(a, 4) / 45.0) < 3.0 * r2.std_error);
}

TEST_CASE("brownian spine size: quartiles, law, rotation invariance") {
    RngState rng(507, 0);
    const double a = 1.0;
    const int n = 50000;
    std::vector<double> comp(n), rotated(n);
    int within = 0;
    const double c = std::cos(0.6), s = std::sin(0.6);
    for (int i = 0; i < n; ++i) {
        const auto v = spine_size_brownian(rng, 3, a);
        comp[static_cast<std::size_t>(i)] = v[0];
        rotated[static_cast<std::size_t>(i)] = c * v[0] - s * v[1];
        if (std::abs(v[0]) <= a) ++within;
    }
    const double f = within / static_cast<double>(n);
    CHECK(std::abs(f - 0.5) < 3.0 * std::sqrt(0.25 / n));
    CHECK(ks_test(comp, [&](double x) { return cauchy_cdf(x, 0.0, a); }).pass);
    CHECK(ks_two_sample(comp, rotated).pass);
}

TEST_CASE("stable spine size: symmetry and parameter validation") {
    RngState rng(508, 0);
    const int n = 20000;
    std::vector<double> comp(n);
    for (int i = 0; i < n; ++i) {
        const auto v = spine_size_stable(rng, 3, 1.2, 1.0);
        comp[static_cast<std::size_t>(i)] = v[0];
    }
    // heavy tails: use the sign balance rather than the mean
    int pos = 0;
    for (double x : comp)
        if (x > 0.0) ++pos;
    CHECK(std::abs(pos / static_cast<double>(n) - 0.5) < 3.0 * std::sqrt(0.25 / n));
    CHECK_THROWS_AS(spine_size_stable(rng, 3, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(spine_size_stable(rng, 3, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("half-space side of the many-to-one formula") {
    RngState rng(509, 0);
    const std::vector<double> x{1.0, 0.0};
    const double a = 0.3;

    auto one = [](const HalfSpacePath&, const HalfSpacePath&) { return 1.0; };
    const auto r1 = many_to_one_rhs(rng, x, 3, a, one, 500, 64);
    CHECK(r1.estimate == 1.0);
    CHECK(r1.std_error == 0.0);

    auto zero = [](const HalfSpacePath&, const HalfSpacePath&) { return 0.0; };
    CHECK(many_to_one_rhs(rng, x, 3, a, zero, 500, 64).estimate == 0.0);

    auto exp1 = [](const HalfSpacePath& h1, const HalfSpacePath&) {
        return std::exp(-h1.horizon());
    };
    const auto re = many_to_one_rhs(rng, x, 3, a, exp1, 20000, 64);
    CHECK(std::abs(re.estimate - std::exp(-a * std::sqrt(2.0))) < 3.0 * re.std_error);

    auto exp_both = [](const HalfSpacePath& h1, const HalfSpacePath& h2) {
        return std::exp(-h1.horizon() - h2.horizon());
    };
    const auto rb = many_to_one_rhs(rng, x, 3, a, exp_both, 20000, 64);
    CHECK(std::abs(rb.estimate - std::exp(-2.0 * a * std::sqrt(2.0))) < 3.0 * rb.std_error);

    CHECK_THROWS_AS(many_to_one_rhs(rng, x, 3, a, one, 50, 64), std::invalid_argument);
}

TEST_CASE("stable disintegration constant for the Cauchy case") {
    // closed Beta-function form of the ray integral at alpha = 1, d = 3
    CHECK(std::abs(stable_disintegration_constant_alpha1(3) - 0.05886097127773431) < 1e-8);
    CHECK_THROWS_AS(stable_disintegration_constant_alpha1(2), std::invalid_argument);
}

TEST_CASE("spine csv export") {
    std::ostringstream os;
    write_spine_csv_header(os, 2);
    write_spine_csv_row(os, 3, 1.0, std::vector<double>{0.5, -0.25});
    const std::string s = os.str();
    CHECK(s.rfind("# gfx-lab v1\n", 0) == 0);
    CHECK(s.find("replicate,a,x0,x1") != std::string::npos);
    CHECK(s.find("3,1,0.5,-0.25") != std::string::npos);
}

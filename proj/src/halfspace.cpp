#include "gfxlab/halfspace.hpp"

#include <cmath>
#include <stdexcept>

#include "gfxlab/bridges.hpp"
#include "gfxlab/distributions.hpp"
#include "gfxlab/excursion.hpp"
#include "gfxlab/quadrature.hpp"

namespace gfx {

void HalfSpacePath::validate() const {
    horizontal.validate();
    vertical.validate();
    if (vertical.dim != 1) throw std::invalid_argument("HalfSpacePath: vertical must be scalar");
    if (horizontal.times != vertical.times)
        throw std::invalid_argument("HalfSpacePath: parts must share one time grid");
    if (start_x.size() != static_cast<std::size_t>(horizontal.dim))
        throw std::invalid_argument("HalfSpacePath: start dimension mismatch");
}

namespace {

// Norm path of a 3-dimensional Brownian motion from the origin, extendable.
struct Bessel3Walker {
    double w[3] = {0.0, 0.0, 0.0};

    double step(RngState& rng, double dt) {
        const double sd = std::sqrt(dt);
        double n2 = 0.0;
        for (auto& c : w) {
            c += sd * rng.gaussian();
            n2 += c * c;
        }
        return std::sqrt(n2);
    }
};

} // namespace

HalfSpacePath sample_bessel_brownian(RngState& rng, int d, std::span<const double> start_x,
                                     double horizon, int steps) {
    if (d < 2) throw std::invalid_argument("sample_bessel_brownian: d >= 2");
    if (!(horizon > 0.0)) throw std::invalid_argument("sample_bessel_brownian: horizon > 0");
    if (steps < 2) throw std::invalid_argument("sample_bessel_brownian: steps >= 2");
    if (start_x.size() != static_cast<std::size_t>(d - 1))
        throw std::invalid_argument("sample_bessel_brownian: start must lie in R^{d-1}");

    auto times = uniform_times(horizon, steps);
    Bessel3Walker walker;
    std::vector<double> vert(times.size());
    vert[0] = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i)
        vert[i] = walker.step(rng, times[i] - times[i - 1]);

    HalfSpacePath p;
    p.vertical = PathGrid(1, times, std::move(vert));
    p.horizontal = brownian_motion_grid(rng, d - 1, std::move(times), start_x);
    p.start_x.assign(start_x.begin(), start_x.end());
    return p;
}

double last_passage(const HalfSpacePath& p, double a, const CrossingRefiner& refiner) {
    if (!(a > 0.0)) throw std::invalid_argument("last_passage: level must be positive");
    const PathGrid& z = p.vertical;
    if (z.scalar(z.size() - 1) <= a)
        throw std::runtime_error("last_passage: horizon too small, vertical endpoint not above level");
    for (std::size_t i = z.size() - 1; i-- > 0;) {
        const double v0 = z.scalar(i), v1 = z.scalar(i + 1);
        if (v0 <= a) return refiner.refine(z.times[i], v0, z.times[i + 1], v1, a);
        const double dt = z.times[i + 1] - z.times[i];
        if (refiner.hidden_crossing(v0, v1, a, dt)) {
            // unseen dip below the level; split toward the closer endpoint
            const double w = (v0 - a) / ((v0 - a) + (v1 - a));
            return z.times[i] + w * dt;
        }
    }
    return 0.0;  // vertical(0) = 0 <= a always, so this is unreachable
}

HalfSpacePath sample_bessel_brownian_above(RngState& rng, int d, std::span<const double> start_x,
                                           double a, int steps) {
    if (!(a > 0.0)) throw std::invalid_argument("sample_bessel_brownian_above: level > 0");
    if (steps < 2) throw std::invalid_argument("sample_bessel_brownian_above: steps >= 2");
    if (start_x.size() != static_cast<std::size_t>(d - 1))
        throw std::invalid_argument("sample_bessel_brownian_above: start must lie in R^{d-1}");

    const double h0 = 10.0 * a * a;
    const double dt = h0 / steps;
    Bessel3Walker walker;
    std::vector<double> times{0.0};
    std::vector<double> vert{0.0};
    std::size_t target = static_cast<std::size_t>(steps);
    for (int doubling = 0; doubling <= 8; ++doubling) {
        while (times.size() <= target) {
            times.push_back(times.back() + dt);
            vert.push_back(walker.step(rng, dt));
        }
        if (vert.back() > 3.0 * a) {
            HalfSpacePath p;
            p.vertical = PathGrid(1, times, std::move(vert));
            p.horizontal = brownian_motion_grid(rng, d - 1, std::move(times), start_x);
            p.start_x.assign(start_x.begin(), start_x.end());
            return p;
        }
        target *= 2;
    }
    throw std::runtime_error("sample_bessel_brownian_above: clearance not reached after 8 doublings");
}

HalfSpacePath sample_to_last_passage(RngState& rng, int d, std::span<const double> start_x,
                                     double a, int steps) {
    if (!(a > 0.0)) throw std::invalid_argument("sample_to_last_passage: level > 0");
    if (steps < 2) throw std::invalid_argument("sample_to_last_passage: steps >= 2");
    if (start_x.size() != static_cast<std::size_t>(d - 1))
        throw std::invalid_argument("sample_to_last_passage: start must lie in R^{d-1}");

    const double g = rng.gaussian();
    const double T = a * a / (g * g);
    HalfSpacePath p;
    p.vertical = bessel3_bridge_between(rng, 0.0, a, T, steps);
    p.horizontal = brownian_motion_grid(rng, d - 1, p.vertical.times, start_x);
    p.start_x.assign(start_x.begin(), start_x.end());
    return p;
}

double bessel3_first_hit(RngState& rng, double a, int steps) {
    if (!(a > 0.0)) throw std::invalid_argument("bessel3_first_hit: level > 0");
    if (steps < 2) throw std::invalid_argument("bessel3_first_hit: steps >= 2");
    const double dt = 4.0 * a * a / steps;
    Bessel3Walker walker;
    double t = 0.0, v = 0.0;
    CrossingRefiner refiner{&rng};
    for (long i = 0; i < 400L * steps; ++i) {
        const double v_next = walker.step(rng, dt);
        if (v_next >= a) return refiner.refine(t, v, t + dt, v_next, a);
        if (refiner.hidden_crossing(v, v_next, a, dt)) {
            const double w = (a - v) / ((a - v) + (a - v_next));
            return t + w * dt;
        }
        t += dt;
        v = v_next;
    }
    throw std::runtime_error("bessel3_first_hit: level not reached (horizon guard)");
}

std::vector<double> spine_size_brownian(RngState& rng, int d, double a) {
    if (d < 2) throw std::invalid_argument("spine_size_brownian: d >= 2");
    if (!(a > 0.0)) throw std::invalid_argument("spine_size_brownian: a > 0");
    const double g = rng.gaussian();
    const double T = a * a / (g * g);
    const double sd = std::sqrt(T);
    std::vector<double> out(static_cast<std::size_t>(d - 1));
    for (auto& v : out) v = sd * rng.gaussian();
    return out;
}

std::vector<double> spine_size_stable(RngState& rng, int d, double alpha, double a) {
    if (d < 2) throw std::invalid_argument("spine_size_stable: d >= 2");
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("spine_size_stable: alpha must lie in (0,2)");
    if (!(a > 0.0)) throw std::invalid_argument("spine_size_stable: a > 0");
    const double g = rng.gaussian();
    const double T = a * a / (g * g);
    // Subordination with E[e^{-l S}] = e^{-T 2^{alpha/2} l^{alpha/2}} makes
    // B^{d-1}(S) isotropic alpha-stable at time T with cf e^{-T |u|^alpha}.
    const double S = sample_positive_stable(rng, 0.5 * alpha, T * std::pow(2.0, 0.5 * alpha));
    const double sd = std::sqrt(S);
    std::vector<double> out(static_cast<std::size_t>(d - 1));
    for (auto& v : out) v = sd * rng.gaussian();
    return out;
}

EstimateReport many_to_one_rhs(RngState& rng, std::span<const double> x, int d, double a,
                               const HalfSpacePairFunctional& F, int N, int steps) {
    if (N < 100) throw std::invalid_argument("many_to_one_rhs: N >= 100 required");
    if (!(a > 0.0)) throw std::invalid_argument("many_to_one_rhs: level must be positive");
    double nx2 = 0.0;
    for (double v : x) nx2 += v * v;
    if (nx2 == 0.0) throw std::invalid_argument("many_to_one_rhs: x must be nonzero");
    const double scale = std::pow(std::sqrt(nx2), static_cast<double>(d));

    const std::vector<double> origin(static_cast<std::size_t>(d - 1), 0.0);
    std::vector<double> vals(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        const HalfSpacePath h1 = sample_to_last_passage(rng, d, origin, a, steps);
        const HalfSpacePath h2 = sample_to_last_passage(rng, d, x, a, steps);
        vals[static_cast<std::size_t>(i)] = F(h1, h2);
    }
    auto r = mean_ci(vals, "many_to_one_rhs");
    r.estimate *= scale;
    r.std_error *= scale;
    r.ci_low = r.estimate - 3.0 * r.std_error;
    r.ci_high = r.estimate + 3.0 * r.std_error;
    r.seed = rng.seed();
    r.stream = rng.stream();
    return r;
}

double stable_disintegration_constant_alpha1(int d) {
    if (d < 3) throw std::invalid_argument("stable_disintegration_constant: d >= 3");
    // Cauchy density in R^{d-1} on a ray: p_1(v e) = c / (1+v^2)^{d/2},
    // c = Gamma(d/2)/pi^{d/2}; exponent omega_d = d - 1/2 for alpha = 1.
    const double c = std::exp(std::lgamma(0.5 * d) - 0.5 * d * std::log(M_PI));
    const double omega_d = d - 0.5;
    auto f = [&](double v) {
        return c * std::pow(v, omega_d - 1.0) / std::pow(1.0 + v * v, 0.5 * d);
    };
    const auto q = integrate_upper_infinite(f, 0.0, 1e-13);
    return q.value / (2.0 * std::sqrt(2.0 * M_PI));
}

void write_spine_csv_header(std::ostream& os, int dim) {
    os << "# gfx-lab v1\n";
    os << "replicate,a";
    for (int k = 0; k < dim; ++k) os << ",x" << k;
    os << "\n";
}

void write_spine_csv_row(std::ostream& os, int replicate, double a, std::span<const double> v) {
    os << replicate << ',' << a;
    for (double c : v) os << ',' << c;
    os << '\n';
}

} // namespace gfx

#include "gfxlab/bridges.hpp"

#include <cmath>
#include <stdexcept>

#include "gfxlab/distributions.hpp"

namespace gfx {

PathGrid brownian_motion_grid(RngState& rng, int dim, std::vector<double> times,
                              std::span<const double> start) {
    if (dim < 1) throw std::invalid_argument("brownian_motion_grid: dim >= 1");
    const std::size_t m = times.size();
    std::vector<double> values(m * static_cast<std::size_t>(dim), 0.0);
    for (int k = 0; k < dim; ++k)
        values[static_cast<std::size_t>(k)] = start.empty() ? 0.0 : start[static_cast<std::size_t>(k)];
    for (std::size_t i = 1; i < m; ++i) {
        const double sd = std::sqrt(times[i] - times[i - 1]);
        for (int k = 0; k < dim; ++k)
            values[i * dim + k] = values[(i - 1) * dim + k] + sd * rng.gaussian();
    }
    return PathGrid(dim, std::move(times), std::move(values));
}

PathGrid brownian_bridge_grid(RngState& rng, int dim, std::vector<double> times,
                              std::span<const double> start, std::span<const double> end) {
    if (dim < 1) throw std::invalid_argument("brownian_bridge_grid: dim >= 1");
    if (start.size() != static_cast<std::size_t>(dim) || end.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("brownian_bridge_grid: endpoint dimension mismatch");
    const std::size_t m = times.size();
    if (m < 2) throw std::invalid_argument("brownian_bridge_grid: need at least 2 grid points");
    const double T = times.back();
    std::vector<double> values(m * static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) values[static_cast<std::size_t>(k)] = start[static_cast<std::size_t>(k)];
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double dt = times[i] - times[i - 1];
        const double rem = T - times[i - 1];
        const double sd = std::sqrt(dt * (T - times[i]) / rem);
        for (int k = 0; k < dim; ++k) {
            const double v = values[(i - 1) * dim + k];
            const double mean = v + (end[static_cast<std::size_t>(k)] - v) * dt / rem;
            values[i * dim + k] = mean + sd * rng.gaussian();
        }
    }
    for (int k = 0; k < dim; ++k) values[(m - 1) * dim + k] = end[static_cast<std::size_t>(k)];
    return PathGrid(dim, std::move(times), std::move(values));
}

PathGrid sample_brownian_bridge(RngState& rng, int n, std::span<const double> endpoint,
                                double duration, int steps) {
    if (!(duration > 0.0)) throw std::invalid_argument("sample_brownian_bridge: duration > 0");
    if (steps < 2) throw std::invalid_argument("sample_brownian_bridge: steps >= 2");
    std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    return brownian_bridge_grid(rng, n, uniform_times(duration, steps), zero, endpoint);
}

PathGrid bessel3_bridge_between(RngState& rng, double r0, double r1, double duration, int steps) {
    if (!(duration > 0.0)) throw std::invalid_argument("bessel3_bridge: duration > 0");
    if (steps < 2) throw std::invalid_argument("bessel3_bridge: steps >= 2");
    if (r0 < 0.0 || r1 < 0.0) throw std::invalid_argument("bessel3_bridge: radii >= 0");
    const double a[3] = {r0, 0.0, 0.0};
    const double b[3] = {r1, 0.0, 0.0};
    PathGrid w = brownian_bridge_grid(rng, 3, uniform_times(duration, steps),
                                      std::span<const double>(a, 3), std::span<const double>(b, 3));
    std::vector<double> norms(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto p = w.at(i);
        norms[i] = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    }
    return PathGrid(1, std::move(w.times), std::move(norms));
}

PathGrid sample_bessel3_bridge(RngState& rng, double duration, int steps) {
    return bessel3_bridge_between(rng, 0.0, 0.0, duration, steps);
}

double sample_gamma_x_duration(RngState& rng, int d) {
    if (d < 3) throw std::invalid_argument("sample_gamma_x_duration: d >= 3");
    return 1.0 / sample_gamma(rng, 0.5 * d, 0.5);
}

double gamma_x_duration_density(double r, int d) {
    if (r <= 0.0) return 0.0;
    const double hd = 0.5 * d;
    return std::exp(-0.5 / r - hd * std::log(2.0) - std::lgamma(hd) - (hd + 1.0) * std::log(r));
}

double sample_ito_duration(RngState& rng, double r_min, double r_max) {
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw std::invalid_argument("sample_ito_duration: need 0 < r_min < r_max");
    const double a = 1.0 / std::sqrt(r_min), b = 1.0 / std::sqrt(r_max);
    const double s = a - rng.uniform() * (a - b);
    return 1.0 / (s * s);
}

double ito_duration_cdf(double r, double r_min, double r_max) {
    if (r <= r_min) return 0.0;
    if (r >= r_max) return 1.0;
    const double a = 1.0 / std::sqrt(r_min), b = 1.0 / std::sqrt(r_max);
    return (a - 1.0 / std::sqrt(r)) / (a - b);
}

} // namespace gfx

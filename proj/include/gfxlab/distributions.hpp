#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gfxlab/rng.hpp"

namespace gfx {

inline double sample_gaussian(RngState& rng) { return rng.gaussian(); }

/// Gamma(shape, rate) by Marsaglia-Tsang squeeze, with the usual
/// power-of-uniform boost for shape < 1.
inline double sample_gamma(RngState& rng, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("sample_gamma: shape and rate must be > 0");

    double boost = 1.0;
    if (shape < 1.0) {
        boost = std::pow(rng.uniform(), 1.0 / shape);
        shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.gaussian();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
    }
}

/// Uniform point on the unit sphere S^{n-1}.  n = 1 degenerates to {-1,+1}.
inline std::vector<double> sample_uniform_sphere(RngState& rng, int n) {
    if (n < 1) throw std::invalid_argument("sample_uniform_sphere: dimension must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (;;) {
        double norm2 = 0.0;
        for (auto& x : v) {
            x = rng.gaussian();
            norm2 += x * x;
        }
        if (norm2 > 1e-24) {
            const double inv = 1.0 / std::sqrt(norm2);
            for (auto& x : v) x *= inv;
            return v;
        }
    }
}

/// One-sided stable variate with Laplace transform E[exp(-l s)] = exp(-c l^a),
/// a in (0,1), by the exact Kanter/Zolotarev representation:
///   s = c^{1/a} (A(U)/E)^{(1-a)/a},  U ~ Unif(0,pi),  E ~ Exp(1),
///   A(u) = [sin(au)^a sin((1-a)u)^{1-a} / sin u]^{1/(1-a)}.
inline double sample_positive_stable(RngState& rng, double index, double scale_time) {
    if (!(index > 0.0) || !(index < 1.0))
        throw std::invalid_argument("sample_positive_stable: index must lie in (0,1)");
    if (scale_time < 0.0)
        throw std::invalid_argument("sample_positive_stable: scale_time must be >= 0");
    if (scale_time == 0.0) return 0.0;

    const double a = index;
    const double u = M_PI * rng.uniform();
    const double e = rng.exponential(1.0);
    const double log_a_fun =
        (a * std::log(std::sin(a * u)) + (1.0 - a) * std::log(std::sin((1.0 - a) * u)) -
         std::log(std::sin(u))) / (1.0 - a);
    const double log_std = ((1.0 - a) / a) * (log_a_fun - std::log(e));
    return std::pow(scale_time, 1.0 / a) * std::exp(log_std);
}

} // namespace gfx

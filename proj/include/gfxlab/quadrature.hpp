#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gfx {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // accumulated error estimate
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1,1].
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kGK15WK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <typename F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double rk = 0.0, rg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = h * kGK15Nodes[i];
        const double fv = (i == 7) ? f(c) : f(c - x) + f(c + x);
        rk += kGK15WK[i] * fv;
        if (i % 2 == 1) rg += kGK15WG[i / 2] * fv;
        else if (i == 7) rg += kGK15WG[3] * fv;
    }
    kronrod = rk * h;
    err = std::abs((rk - rg) * h);
}

template <typename F>
inline void adapt(const F& f, double a, double b, double tol, int depth, QuadResult& acc,
                  long& budget) {
    double v, e;
    gk15(f, a, b, v, e);
    // the relative floor stops refinement once the panel error reaches the
    // evaluation noise of the integrand itself
    if (e < tol || e < 1e-13 * std::abs(v) || depth >= 40 || --budget <= 0 ||
        b - a < 1e-300) {
        acc.value += v;
        acc.error += e;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth + 1, acc, budget);
    adapt(f, m, b, 0.5 * tol, depth + 1, acc, budget);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration over a finite interval.
template <typename F>
inline QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-12) {
    if (!(b >= a)) throw std::invalid_argument("integrate: bad interval");
    QuadResult acc;
    if (a == b) return acc;
    long budget = 20000;  // panel cap; leftover error stays in the estimate
    detail::adapt(f, a, b, abs_tol, 0, acc, budget);
    return acc;
}

/// Integration with interior break points (singularities, kinks).
template <typename F>
inline QuadResult integrate(const F& f, const std::vector<double>& points, double abs_tol = 1e-12) {
    if (points.size() < 2) throw std::invalid_argument("integrate: need at least two points");
    QuadResult acc;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const QuadResult r = integrate(f, points[i], points[i + 1], abs_tol / static_cast<double>(points.size()));
        acc.value += r.value;
        acc.error += r.error;
    }
    return acc;
}

/// Integral over [a, infinity) through the substitution t = a + u/(1-u).
template <typename F>
inline QuadResult integrate_upper_infinite(const F& f, double a, double abs_tol = 1e-12) {
    auto g = [&](double u) {
        const double om = 1.0 - u;
        const double t = a + u / om;
        return f(t) / (om * om);
    };
    return integrate(g, 0.0, 1.0 - 1e-14, abs_tol);
}

/// Gauss-Legendre nodes and weights on [-1,1], computed by Newton iteration.
struct GaussLegendre {
    std::vector<double> nodes, weights;

    explicit GaussLegendre(int n) {
        if (n < 2) throw std::invalid_argument("GaussLegendre: n >= 2 required");
        nodes.resize(static_cast<std::size_t>(n));
        weights.resize(static_cast<std::size_t>(n));
        const int m = (n + 1) / 2;
        for (int i = 0; i < m; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[static_cast<std::size_t>(i)] = -x;
            nodes[static_cast<std::size_t>(n - 1 - i)] = x;
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[static_cast<std::size_t>(i)] = w;
            weights[static_cast<std::size_t>(n - 1 - i)] = w;
        }
    }

    /// Apply the rule mapped onto [a,b].
    template <typename F>
    double apply(const F& f, double a, double b) const {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(c + h * nodes[i]);
        return s * h;
    }
};

/// Bisection to |b-a| <= xtol; f(a) and f(b) must have opposite signs.
template <typename F>
inline double bisect_root(const F& f, double a, double b, double xtol = 1e-12) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("bisect_root: no sign change");
    while (b - a > xtol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

} // namespace gfx

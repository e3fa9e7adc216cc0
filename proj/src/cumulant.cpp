#include "gfxlab/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gfxlab/distributions.hpp"
#include "gfxlab/quadrature.hpp"

namespace gfx {

double toy_psi(const ToyCP& spec, double q) {
    return -spec.drift * q + spec.lambda * (std::pow(spec.beta, q) - 1.0);
}

double sphere_surface(int k) {
    if (k < 0) throw std::invalid_argument("sphere_surface: k >= 0");
    const double kp1 = 0.5 * (k + 1);
    return 2.0 * std::exp(kp1 * std::log(M_PI) - std::lgamma(kp1));
}

double stable_kernel_constant(double alpha, int d) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("stable_kernel_constant: alpha in (0,2)");
    // |Gamma(-alpha/2)| = pi / (sin(pi alpha/2) Gamma(1 + alpha/2))
    const double abs_gamma_neg = M_PI / (std::sin(0.5 * M_PI * alpha) * std::tgamma(1.0 + 0.5 * alpha));
    return std::pow(2.0, alpha - 1.0) * std::pow(M_PI, -static_cast<double>(d)) *
           std::tgamma(0.5 * (d + alpha)) * std::tgamma(0.5 * d) / abs_gamma_neg;
}

namespace {

void check_unit_theta(std::span<const double> theta, int d) {
    if (theta.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("jump_integral: theta must lie in R^d");
    double n2 = 0.0;
    for (double v : theta) n2 += v * v;
    if (std::abs(n2 - 1.0) > 1e-9)
        throw std::invalid_argument("jump_integral: theta must be a unit vector");
}

JumpIntegralResult toy_jump_integral(const ToyCP& spec, double q, double tol) {
    // lambda E|1 - beta e^{iW}|^q, W uniform; the modulus is bounded in
    // [1-beta, 1+beta] so the integral is finite for every real q.
    const double b2 = spec.beta * spec.beta;
    auto f = [&](double w) { return std::pow(1.0 + b2 - 2.0 * spec.beta * std::cos(w), 0.5 * q); };
    const QuadResult r = integrate(f, 0.0, M_PI, tol);
    JumpIntegralResult out;
    out.value = spec.lambda * r.value / M_PI;
    out.error = spec.lambda * r.error / M_PI;
    return out;
}

// |e^x Phi - theta|^2 at polar angle g from theta, in the cancellation-free
// form expm1(x)^2 + 4 e^x sin^2(g/2)
double chord2(double x, double g) {
    const double em = std::expm1(x);
    const double sh = std::sin(0.5 * g);
    return em * em + 4.0 * std::exp(x) * sh * sh;
}

// smallest admissible polar angle under the child-size floor
double gamma_min(double x, double floor) {
    if (floor <= 0.0) return 0.0;
    const double em = std::expm1(x);
    const double arg = (floor * floor - em * em) / (4.0 * std::exp(x));
    if (arg <= 0.0) return 0.0;
    if (arg >= 1.0) return M_PI;  // the whole sphere is inside the floor ball
    return 2.0 * std::asin(std::sqrt(arg));
}

JumpIntegralResult stable_jump_integral(const IsotropicStable& spec, double q,
                                        const JumpWindow& win, double tol) {
    JumpIntegralResult out;
    const double alpha = spec.alpha;
    const int d = spec.d;

    if (!std::isfinite(win.x_max) && q >= alpha) {
        out.divergent = true;
        out.reason = "large-jump tail diverges for q >= alpha without an upper window";
        return out;
    }
    const bool corner_in_window = win.x_min < 0.0 && win.x_max > 0.0;
    if (win.min_jump_norm <= 0.0 && q <= alpha && corner_in_window) {
        out.divergent = true;
        out.reason = "small-jump corner diverges for q <= alpha without a jump-size floor";
        return out;
    }

    const double c = stable_kernel_constant(alpha, d);
    const double ang_const = sphere_surface(d - 2);
    static thread_local const GaussLegendre gl(24);

    const double delta = win.min_jump_norm;
    auto inner = [&](double x) {
        const double g0 = gamma_min(x, delta);
        if (g0 >= M_PI) return 0.0;
        const double p = 0.5 * (q - alpha - d);
        auto fg = [&](double g) {
            const double rho2 = chord2(x, g);
            const double w = (d == 2) ? 1.0 : std::pow(std::sin(g), static_cast<double>(d - 2));
            return w * std::exp(p * std::log(rho2));
        };
        // geometric segments resolve the peak at the O(|x| + floor) scale
        const double scale = std::min(std::max(std::max(std::abs(x), delta), 1e-14), M_PI);
        double v = 0.0;
        double lo = g0;
        for (double s = scale; s < M_PI; s *= 16.0) {
            if (s <= lo) continue;
            v += gl.apply(fg, lo, s);
            lo = s;
        }
        v += gl.apply(fg, lo, M_PI);
        return v;
    };

    auto g = [&](double x) { return std::exp(d * x) * inner(x); };

    // effective x range: the far-left tail decays like e^{dx}
    double x_lo = win.x_min, x_hi = win.x_max;
    if (!std::isfinite(x_lo)) x_lo = std::log(tol) / d - 5.0;
    if (!std::isfinite(x_hi)) x_hi = std::log(tol) / (q - alpha) + 5.0;  // q < alpha here

    QuadResult acc;
    const double piece_tol = tol / (6.0 * c * ang_const);
    auto add_direct = [&](double a, double b) {
        if (b <= a) return;
        const QuadResult r = integrate(g, a, b, piece_tol);
        acc.value += r.value;
        acc.error += r.error;
    };
    // Integration over 0 < |x| < b on one side of the corner.  The integrand
    // behaves like |x|^{q-alpha-1} there; substituting u = |x|^{q-alpha}
    // removes the endpoint singularity of the delta = 0 case.
    auto add_corner_side = [&](double sign, double b) {
        if (b <= 0.0) return;
        const double s = q - alpha;
        if (delta > 0.0) {
            std::vector<double> pts{0.0};
            for (double t = std::min(delta, b); t < b; t *= 16.0) pts.push_back(t);
            pts.push_back(b);
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                if (sign > 0.0) add_direct(pts[i], pts[i + 1]);
                else add_direct(-pts[i + 1], -pts[i]);
            }
            return;
        }
        if (s >= 1.0) {
            if (sign > 0.0) add_direct(0.0, b);
            else add_direct(-b, 0.0);
            return;
        }
        auto h = [&](double u) {
            const double x = sign * std::pow(u, 1.0 / s);
            return g(x) * std::pow(u, 1.0 / s - 1.0) / s;
        };
        const QuadResult r = integrate(h, 0.0, std::pow(b, s), piece_tol);
        acc.value += r.value;
        acc.error += r.error;
    };

    if (!corner_in_window) {
        add_direct(x_lo, x_hi);
    } else {
        const double bl = std::min(1.0, -x_lo), br = std::min(1.0, x_hi);
        add_direct(x_lo, -bl);
        add_corner_side(-1.0, bl);
        add_corner_side(+1.0, br);
        add_direct(br, x_hi);
    }
    out.value = c * ang_const * acc.value;
    out.error = c * ang_const * acc.error;
    return out;
}

} // namespace

JumpIntegralResult jump_integral(const LevySystemSpec& spec, double q,
                                 std::span<const double> theta, const JumpWindow& window,
                                 double tol) {
    if (const auto* toy = std::get_if<ToyCP>(&spec)) {
        (void)theta;
        return toy_jump_integral(*toy, q, tol);
    }
    const auto& st = std::get<IsotropicStable>(spec);
    if (!theta.empty()) check_unit_theta(theta, st.d);
    return stable_jump_integral(st, q, window, tol);
}

EstimateReport jump_integral_mc_oracle(RngState& rng, const LevySystemSpec& spec, double q,
                                       std::span<const double> theta, std::size_t N,
                                       const JumpWindow& window) {
    if (N < 1000) throw std::invalid_argument("jump_integral_mc_oracle: N >= 10^3 required");

    if (const auto* toy = std::get_if<ToyCP>(&spec)) {
        std::vector<double> vals(N);
        const double b2 = toy->beta * toy->beta;
        for (auto& v : vals) {
            const double w = 2.0 * M_PI * rng.uniform();
            v = toy->lambda * std::pow(1.0 + b2 - 2.0 * toy->beta * std::cos(w), 0.5 * q);
        }
        auto r = mean_ci(vals, "jump_integral_mc_toy");
        r.seed = rng.seed();
        r.stream = rng.stream();
        return r;
    }

    const auto& st = std::get<IsotropicStable>(spec);
    check_unit_theta(theta, st.d);
    if (!std::isfinite(window.x_max))
        throw std::invalid_argument("jump_integral_mc_oracle: finite x_max window required");
    const double s = q - st.alpha;
    const double delta = window.min_jump_norm;
    if (delta <= 0.0 && s <= 0.0)
        throw std::invalid_argument("jump_integral_mc_oracle: jump-size floor required for q <= alpha");

    // Jump destinations live in Cartesian jump space z = e^x Phi - theta with
    // kernel c(alpha)|z|^{-alpha-d} d^d z.  Sample |z| from the q-tilted
    // radial profile r^{q-alpha-1} on [delta, rmax] (closed-form inverse cdf)
    // and a uniform direction; the x-window enters as an indicator.
    const double rmax = std::exp(window.x_max) + 1.0;
    const double c = stable_kernel_constant(st.alpha, st.d);
    const double area = sphere_surface(st.d - 1);
    double mass;  // integral of c area r^{q-alpha-1} over [delta, rmax]
    if (s != 0.0) mass = c * area * (std::pow(rmax, s) - std::pow(delta, s)) / s;
    else mass = c * area * std::log(rmax / delta);

    std::vector<double> vals(N);
    std::vector<double> z(static_cast<std::size_t>(st.d));
    for (auto& v : vals) {
        double r;
        if (s != 0.0) {
            const double u = rng.uniform();
            r = std::pow(std::pow(delta, s) + u * (std::pow(rmax, s) - std::pow(delta, s)), 1.0 / s);
        } else {
            r = delta * std::pow(rmax / delta, rng.uniform());
        }
        auto dir = sample_uniform_sphere(rng, st.d);
        double w2 = 0.0;
        for (int k = 0; k < st.d; ++k) {
            z[static_cast<std::size_t>(k)] = theta[static_cast<std::size_t>(k)] + r * dir[static_cast<std::size_t>(k)];
            w2 += z[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
        }
        const double x = 0.5 * std::log(w2);
        v = (x >= window.x_min && x <= window.x_max) ? mass : 0.0;
    }
    auto r = mean_ci(vals, "jump_integral_mc_stable");
    r.seed = rng.seed();
    r.stream = rng.stream();
    return r;
}

KappaValue kappa(const LevySystemSpec& spec, const PsiFn& psi, double q, const JumpWindow& window) {
    const JumpIntegralResult j = jump_integral(spec, q, {}, window);
    if (j.divergent) return {0.0, true};
    return {psi(q) + j.value, false};
}

KappaScan find_roots(const LevySystemSpec& spec, const PsiFn& psi, double q_lo, double q_hi,
                     const JumpWindow& window) {
    if (!(q_hi > q_lo)) throw std::invalid_argument("find_roots: empty bracket");
    constexpr int kGrid = 256;
    KappaScan scan;
    scan.q_grid.resize(kGrid + 1);
    scan.values.resize(kGrid + 1);
    scan.errors.resize(kGrid + 1);
    for (int i = 0; i <= kGrid; ++i) {
        const double q = q_lo + (q_hi - q_lo) * i / kGrid;
        const JumpIntegralResult j = jump_integral(spec, q, {}, window);
        if (j.divergent) throw std::runtime_error("find_roots: kappa diverges inside the bracket");
        scan.q_grid[static_cast<std::size_t>(i)] = q;
        scan.values[static_cast<std::size_t>(i)] = psi(q) + j.value;
        scan.errors[static_cast<std::size_t>(i)] = j.error;
    }
    // convexity by second differences (uniform grid)
    for (int i = 1; i < kGrid; ++i) {
        const double dd = scan.values[static_cast<std::size_t>(i + 1)] - 2.0 * scan.values[static_cast<std::size_t>(i)] +
                          scan.values[static_cast<std::size_t>(i - 1)];
        if (dd < -1e-8 * (1.0 + std::abs(scan.values[static_cast<std::size_t>(i)]))) scan.convex = false;
    }

    auto kfun = [&](double q) {
        const JumpIntegralResult j = jump_integral(spec, q, {}, window);
        if (j.divergent) throw std::runtime_error("find_roots: divergence during bisection");
        return psi(q) + j.value;
    };
    for (int i = 0; i < kGrid; ++i) {
        const double v0 = scan.values[static_cast<std::size_t>(i)], v1 = scan.values[static_cast<std::size_t>(i + 1)];
        if (v0 == 0.0) {
            scan.roots.push_back(scan.q_grid[static_cast<std::size_t>(i)]);
        } else if (v0 * v1 < 0.0) {
            scan.roots.push_back(bisect_root(kfun, scan.q_grid[static_cast<std::size_t>(i)],
                                             scan.q_grid[static_cast<std::size_t>(i + 1)], 1e-11));
        }
    }
    if (scan.values.back() == 0.0) scan.roots.push_back(q_hi);
    if (scan.roots.size() > 2)
        throw std::runtime_error("find_roots: more than two roots, convexity violated");
    for (double r : scan.roots)
        scan.max_root_residual = std::max(scan.max_root_residual, std::abs(kfun(r)));
    return scan;
}

double spine_exponent(const LevySystemSpec& spec, const PsiFn& psi, double omega, double q,
                      const JumpWindow& window) {
    const KappaValue at_root = kappa(spec, psi, omega, window);
    if (at_root.divergent || std::abs(at_root.value) > 1e-9)
        throw std::invalid_argument("spine_exponent: omega is not a root of kappa");
    const KappaValue v = kappa(spec, psi, omega + q, window);
    if (v.divergent) throw std::runtime_error("spine_exponent: kappa diverges at omega + q");
    return v.value;
}

SumKappaCheck sum_kappa_identity_check(RngState& rng, const ToyCP& spec, const PsiFn& psi,
                                       double q, std::size_t N) {
    if (N < 100) throw std::invalid_argument("sum_kappa_identity_check: N too small");
    if (spec.lambda <= 0.0)
        throw std::invalid_argument("sum_kappa_identity_check: jump activity required");
    const double psi_q = psi(q);
    if (!(psi_q < 0.0))
        throw std::invalid_argument("sum_kappa_identity_check: psi(q) < 0 required");
    const KappaValue k = kappa(LevySystemSpec{spec}, psi, q);
    if (k.divergent) throw std::runtime_error("sum_kappa_identity_check: kappa diverges");

    // Radial simulation of one cell from a unit vector: the radius decays by
    // e^{-b dt} between jumps and by beta at jumps, independently of the
    // rotation angles, so only |1 - beta e^{iW}| is sampled per jump.
    const double floor = 1e-5;
    const double b2 = spec.beta * spec.beta;
    std::vector<double> sums(N);
    for (auto& acc : sums) {
        acc = 0.0;
        double radius = 1.0;
        while (radius >= floor) {
            radius *= std::exp(-spec.drift * rng.exponential(spec.lambda));
            const double w = 2.0 * M_PI * rng.uniform();
            const double child = radius * std::sqrt(1.0 + b2 - 2.0 * spec.beta * std::cos(w));
            acc += std::pow(child, q);
            radius *= spec.beta;
        }
    }
    SumKappaCheck out;
    out.mc = mean_ci(sums, "sum_kappa_mc");
    out.mc.seed = rng.seed();
    out.mc.stream = rng.stream();
    out.target = 1.0 - k.value / psi_q;
    out.tail_bound = std::pow(floor, q) * out.target;
    out.mc.diagnostics["tail_bound"] = out.tail_bound;
    return out;
}

void write_kappa_csv(std::ostream& os, const KappaScan& scan) {
    os << "# gfx-lab v1\n";
    os << "q,kappa,error\n";
    for (std::size_t i = 0; i < scan.q_grid.size(); ++i)
        os << scan.q_grid[i] << ',' << scan.values[i] << ',' << scan.errors[i] << '\n';
}

} // namespace gfx

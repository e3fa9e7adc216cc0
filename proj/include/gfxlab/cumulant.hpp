#pragma once

#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gfxlab/rng.hpp"
#include "gfxlab/stats.hpp"

namespace gfx {

/// Compound-Poisson toy driver: jump rate lambda, radial contraction beta in
/// (0,1) with a uniformly rotated angle, log-radius drift -b between jumps.
/// Laplace exponent of the log-radius: psi(q) = -b q + lambda (beta^q - 1).
struct ToyCP {
    int n = 2;          // ambient dimension
    double lambda = 1.0;
    double beta = 0.5;
    double drift = 0.25;
};

/// Isotropic alpha-stable jump system in R^d with kernel density
/// c(alpha) e^{dx} / |e^x Phi - theta|^{alpha+d} against dx sigma(dPhi).
struct IsotropicStable {
    double alpha = 1.0;
    int d = 2;
};

using LevySystemSpec = std::variant<ToyCP, IsotropicStable>;

/// Integration window for the stable jump integral: ordinate-jump range
/// [x_min, x_max] and an optional floor on the child size |theta - e^x Phi|.
/// The unwindowed stable integral diverges for every exponent (small jumps
/// for q <= alpha, large ones for q >= alpha), so finite answers are always
/// window answers.
struct JumpWindow {
    double x_min = -std::numeric_limits<double>::infinity();
    double x_max = std::numeric_limits<double>::infinity();
    double min_jump_norm = 0.0;

    bool bounded() const { return std::isfinite(x_min) && std::isfinite(x_max); }
};

struct JumpIntegralResult {
    double value = 0.0;
    double error = 0.0;     // quadrature error estimate
    bool divergent = false;
    std::string reason;     // which end diverges
};

double toy_psi(const ToyCP& spec, double q);

/// The constant c(alpha) of the isotropic stable jump kernel.
double stable_kernel_constant(double alpha, int d);

/// Surface area of the unit sphere S^k in R^{k+1}.
double sphere_surface(int k);

/// J(q; theta) = integral of |theta - e^x Phi|^q against the jump kernel.
/// ToyCP: lambda E|1 - beta e^{iW}|^q by 1-d quadrature (window ignored).
/// IsotropicStable: 2-d quadrature over (x, polar angle), divergence
/// reported when the window does not make the integral finite.
JumpIntegralResult jump_integral(const LevySystemSpec& spec, double q,
                                 std::span<const double> theta, const JumpWindow& window = {},
                                 double tol = 1e-11);

/// Independent Monte-Carlo evaluation of the same windowed integral, used
/// only for cross-validation of the quadrature.  Stable case: jumps are
/// sampled in Cartesian jump space from the q-tilted radial profile over the
/// window (exact inverse cdf) and corrected by the tilted window mass.
EstimateReport jump_integral_mc_oracle(RngState& rng, const LevySystemSpec& spec, double q,
                                       std::span<const double> theta, std::size_t N,
                                       const JumpWindow& window);

using PsiFn = std::function<double(double)>;

struct KappaValue {
    double value = 0.0;
    bool divergent = false;
};

/// kappa(q) = psi(q) + J(q); divergence of the jump integral propagates.
KappaValue kappa(const LevySystemSpec& spec, const PsiFn& psi, double q,
                 const JumpWindow& window = {});

struct KappaScan {
    std::vector<double> q_grid;
    std::vector<double> values;
    std::vector<double> errors;
    std::vector<double> roots;
    bool convex = true;
    double max_root_residual = 0.0;
};

/// Sign-change scan on a 256-point grid followed by bisection; kappa must be
/// finite on the bracket.  At most two roots by convexity (checked).
KappaScan find_roots(const LevySystemSpec& spec, const PsiFn& psi, double q_lo, double q_hi,
                     const JumpWindow& window = {});

/// Laplace exponent of the tagged-cell log-radius: kappa(omega + q), with
/// omega verified to be a root to 1e-9.
double spine_exponent(const LevySystemSpec& spec, const PsiFn& psi, double omega, double q,
                      const JumpWindow& window = {});

struct SumKappaCheck {
    EstimateReport mc;       // Monte-Carlo E[sum of |jump|^q over the cell path]
    double target = 0.0;     // 1 - kappa(q)/psi(q)
    double tail_bound = 0.0; // size-floor truncation bound
};

/// Monte-Carlo check of the expected q-power jump sum of a single toy cell
/// against 1 - kappa(q)/psi(q); requires psi(q) < 0 and jump activity.
SumKappaCheck sum_kappa_identity_check(RngState& rng, const ToyCP& spec, const PsiFn& psi,
                                       double q, std::size_t N);

/// CSV table (q, kappa, error estimate).
void write_kappa_csv(std::ostream& os, const KappaScan& scan);

} // namespace gfx

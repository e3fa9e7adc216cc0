#pragma once

#include <span>
#include <vector>

#include "gfxlab/grid.hpp"
#include "gfxlab/rng.hpp"

namespace gfx {

/// Free Brownian motion in R^dim on an explicit time grid, started at `start`
/// (pass empty for the origin).  Exact at grid points.
PathGrid brownian_motion_grid(RngState& rng, int dim, std::vector<double> times,
                              std::span<const double> start = {});

/// Brownian bridge in R^dim between given endpoints on an explicit grid,
/// sampled by sequential conditional Gaussian updates.  First and last grid
/// values are set exactly.
PathGrid brownian_bridge_grid(RngState& rng, int dim, std::vector<double> times,
                              std::span<const double> start, std::span<const double> end);

/// Bridge from 0 to `endpoint` over [0, duration] on a uniform grid.
PathGrid sample_brownian_bridge(RngState& rng, int n, std::span<const double> endpoint,
                                double duration, int steps);

/// Nonnegative bridge from 0 to 0, realized as the norm of a 3-dimensional
/// Brownian bridge (identity in law, no SDE discretization bias).
PathGrid sample_bessel3_bridge(RngState& rng, double duration, int steps);

/// Norm-of-3-dimensional-bridge between radii r0 and r1 (general endpoints,
/// same construction as above).
PathGrid bessel3_bridge_between(RngState& rng, double r0, double r1, double duration, int steps);

/// Duration factor r of the conditioned half-space excursion, with density
/// e^{-1/(2r)} / (2^{d/2} Gamma(d/2) r^{d/2+1}) on (0,inf); sampled exactly as
/// 1/s with s ~ Gamma(d/2, rate 1/2).
double sample_gamma_x_duration(RngState& rng, int d);

/// Density of the above (for quadrature checks).
double gamma_x_duration_density(double r, int d);

/// Excursion-duration density proportional to r^{-3/2}, truncated to
/// [r_min, r_max]; closed-form inverse cdf.
double sample_ito_duration(RngState& rng, double r_min, double r_max);
double ito_duration_cdf(double r, double r_min, double r_max);

} // namespace gfx

#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "gfxlab/excursion.hpp"
#include "gfxlab/grid.hpp"
#include "gfxlab/rng.hpp"
#include "gfxlab/stats.hpp"

namespace gfx {

/// Half-space path: (d-1)-dimensional Brownian horizontal part and an
/// independent nonnegative vertical part started at 0 (norm of a
/// 3-dimensional Brownian motion, or a pinned variant of it).
struct HalfSpacePath {
    PathGrid horizontal;           // dim d-1
    PathGrid vertical;             // dim 1
    std::vector<double> start_x;   // horizontal(0)

    double horizon() const { return vertical.duration(); }
    void validate() const;
};

/// Free upward excursion to a fixed horizon: horizontal Brownian motion from
/// start_x, vertical = norm of a 3-dimensional Brownian motion from 0.
HalfSpacePath sample_bessel_brownian(RngState& rng, int d, std::span<const double> start_x,
                                     double horizon, int steps);

/// Last refined time the vertical part is <= a.  The caller must supply a
/// path whose vertical endpoint exceeds a ("horizon too small" otherwise).
/// An RNG-bearing refiner also detects unseen dips below the level inside
/// grid intervals.
double last_passage(const HalfSpacePath& p, double a, const CrossingRefiner& refiner = {});

/// Free excursion guaranteed clear of level a at its end: horizon starts at
/// 10 a^2 and doubles until vertical(horizon) > 3a, up to 8 doublings (then
/// an explicit error, never a silent bias).
HalfSpacePath sample_bessel_brownian_above(RngState& rng, int d, std::span<const double> start_x,
                                           double a, int steps);

/// Path of a half-space excursion run exactly up to its last passage at
/// level a.  The duration is drawn first (a^2/G^2, the exact last-passage
/// law by time reversal of a killed Brownian motion), then the vertical part
/// is filled in as a nonnegative first-passage bridge from 0 to a and the
/// horizontal part as a free Brownian motion of that duration.
HalfSpacePath sample_to_last_passage(RngState& rng, int d, std::span<const double> start_x,
                                     double a, int steps);

/// First time the vertical part of a fresh excursion reaches level a,
/// simulated on a grid of the given resolution with crossing refinement;
/// horizon is extended until the level is reached.
double bessel3_first_hit(RngState& rng, double a, int steps);

/// Exact spine-size marginal at height a for the Brownian case: the
/// horizontal Brownian motion evaluated at an independent first hitting time
/// of a, i.e. an isotropic Cauchy vector of scale a in R^{d-1}.
std::vector<double> spine_size_brownian(RngState& rng, int d, double a);

/// Exact spine-size marginal for the stable case: an isotropic alpha-stable
/// process in R^{d-1} (characteristic function e^{-t|u|^alpha}) evaluated at
/// an independent Brownian first hitting time of a, by subordination.
std::vector<double> spine_size_stable(RngState& rng, int d, double alpha, double a);

using HalfSpacePairFunctional =
    std::function<double(const HalfSpacePath&, const HalfSpacePath&)>;

/// |x|^d times the Monte-Carlo average of F over two independent excursions
/// truncated at their last passage at a, started from 0 and from (x, 0).
EstimateReport many_to_one_rhs(RngState& rng, std::span<const double> x, int d, double a,
                               const HalfSpacePairFunctional& F, int N, int steps);

/// Normalization constant of the endpoint disintegration in the stable case,
/// evaluated for alpha = 1 where the transition density has the closed
/// Cauchy form (general alpha would need the stable density on a ray).
double stable_disintegration_constant_alpha1(int d);

/// CSV export of spine-size samples: replicate, a, components.
void write_spine_csv_header(std::ostream& os, int dim);
void write_spine_csv_row(std::ostream& os, int replicate, double a, std::span<const double> v);

} // namespace gfx

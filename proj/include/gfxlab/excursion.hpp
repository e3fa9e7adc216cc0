#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "gfxlab/bridges.hpp"
#include "gfxlab/grid.hpp"
#include "gfxlab/rng.hpp"
#include "gfxlab/stats.hpp"

namespace gfx {

/// One conditioned half-space excursion: horizontal displacement in R^{d-1}
/// and a nonnegative vertical part sharing the same time grid.  The vertical
/// part vanishes at both ends; the horizontal part runs from 0 to endpoint_x.
struct ExcursionPath {
    PathGrid horizontal;             // dim d-1
    PathGrid vertical;               // dim 1
    std::vector<double> endpoint_x;  // conditioned endpoint in R^{d-1}

    int space_dim() const { return horizontal.dim + 1; }
    double duration() const { return vertical.duration(); }
    void validate() const;
};

/// A maximal interval where the vertical part exceeds a level, together with
/// the horizontal displacement across it.
struct SubExcursion {
    double start_time = 0.0;
    double end_time = 0.0;
    std::vector<double> delta;  // horizontal(end) - horizontal(start)
    int chrono_index = 0;

    double norm() const;
};

/// Crossing-time refinement policy between bracketing grid points.  With an
/// RNG attached, crossing times are drawn by conditional Gaussian bisection
/// (fixed depth) and intervals whose endpoints both sit on one side of the
/// level are tested for an unseen crossing with the Brownian-bridge
/// first-passage probability.  Without an RNG, plain linear interpolation is
/// used, which is the exact answer for piecewise-linear test paths.
struct CrossingRefiner {
    RngState* rng = nullptr;
    int depth = 8;

    double refine(double t_lo, double v_lo, double t_hi, double v_hi, double level) const;

    /// Did the bridge cross the level inside an interval whose endpoint
    /// values v_lo, v_hi are both strictly on the same side of it?
    bool hidden_crossing(double v_lo, double v_hi, double level, double dt) const;
};

/// Draw from the conditioned excursion measure with endpoint x: a duration
/// factor r (see sample_gamma_x_duration), a nonnegative bridge of duration
/// r|x|^2 for the vertical part, and an independent (d-1)-dimensional
/// Brownian bridge from 0 to x for the horizontal part.
ExcursionPath sample_gamma_x(RngState& rng, std::span<const double> x, int d, int steps);

/// Maximal intervals where a scalar path exceeds the level, with refined
/// endpoints, chronological order.
std::vector<std::pair<double, double>> slice_intervals(const PathGrid& vertical, double a,
                                                       const CrossingRefiner& refiner = {});

/// All maximal sub-excursions above level a, chronological order.  Crossing
/// times are refined per the policy; deltas use linear bridge interpolation
/// of the horizontal part at the refined times.  Sub-excursions of any size
/// are returned; filtering is the caller's choice.
std::vector<SubExcursion> slice(const ExcursionPath& e, double a,
                                const CrossingRefiner& refiner = {});

struct MartingaleValue {
    double value = 0.0;
    int discarded = 0;  // sub-excursions below the size floor
    bool hit = false;   // vertical part reached the level
};

/// Sum of |delta|^omega over sub-excursions above a, discarding those with
/// |delta| < eps_floor (count reported).  Zero when the level is never hit.
MartingaleValue martingale_value(const ExcursionPath& e, double a, double omega,
                                 double eps_floor, const CrossingRefiner& refiner = {});

/// First refined crossing time of the level by a scalar path.  With an
/// RNG-bearing refiner, intervals below the level are additionally tested
/// for bridge crossings, which removes the sqrt(dt) late-detection bias.
std::optional<double> first_crossing(const PathGrid& vertical, double a,
                                     const CrossingRefiner& refiner = {});

/// Same, applied to the vertical part of an excursion.
std::optional<double> hits_level(const ExcursionPath& e, double a,
                                 const CrossingRefiner& refiner = {});

/// Duration-biased view of the excursion measure: a height A drawn uniformly
/// from [0, a_max] (window truncation of the Lebesgue height law), and two
/// independent d-dimensional trajectories in relative coordinates, each a
/// Brownian motion killed when its last coordinate reaches -A.  Sampled
/// exactly: the kill time is A^2/G^2 and the killed last coordinate is a
/// first-passage bridge (nonnegative bridge shifted by -A).
struct BismutSample {
    double height = 0.0;
    PathGrid left;   // dim d, last coordinate is the vertical one
    PathGrid right;
};
BismutSample bismut_sample(RngState& rng, int d, double a_max, int steps);

/// View over a piece of an excursion: the trajectory before a sub-excursion
/// (forward) or after it (time-reversed), in absolute coordinates.
struct PathSegmentView {
    const ExcursionPath* path = nullptr;
    double seg_start = 0.0;  // absolute time where the segment starts
    double seg_end = 0.0;    // absolute time where it ends
    bool reversed = false;   // s -> seg_end - s when true

    double duration() const { return seg_end - seg_start; }
    std::vector<double> horizontal_at(double s) const;
    double vertical_at(double s) const;
};

using PairFunctional = std::function<double(const PathSegmentView&, const PathSegmentView&)>;

/// Monte-Carlo estimate of the sliced-excursion average
///   E_x[ 1{level hit} sum_s |delta_s|^d F(before_s, reversed-after_s) ].
EstimateReport many_to_one_lhs(RngState& rng, std::span<const double> x, int d, double a,
                               const PairFunctional& F, int N, int steps);

/// Minimum |delta| over all sub-excursions at the given levels whose duration
/// exceeds min_duration; +infinity when none qualify.  Empirical check that
/// sliced excursions do not pinch to zero displacement.
double no_bubble_check(const ExcursionPath& e, std::span<const double> levels,
                       double min_duration, const CrossingRefiner& refiner = {});

/// CSV export, one row per sub-excursion: replicate, level, start, end, delta.
void write_subexcursion_csv_header(std::ostream& os, int horizontal_dim);
void write_subexcursion_csv_rows(std::ostream& os, int replicate, double level,
                                 std::span<const SubExcursion> subs);

} // namespace gfx

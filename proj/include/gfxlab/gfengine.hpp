#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gfxlab/cumulant.hpp"
#include "gfxlab/rng.hpp"

namespace gfx {

/// The toy driving process of the cell system is the compound-Poisson spec
/// shared with the cumulant module: radial decay e^{-b t} between jumps, and
/// at rate lambda a contraction by beta composed with a uniform-angle
/// rotation.  Divisions are conservative: the child size is the parent's
/// jump with opposite sign.
using ToyDrivingSpec = ToyCP;

struct JumpRecord {
    double time = 0.0;                // relative to the cell's birth
    double angle = 0.0;               // rotation angle W of this jump
    double log_size_ratio = 0.0;      // log(|child| / |parent before jump|)
    std::vector<double> child;        // child initial size vector
    std::vector<double> state_after;  // parent immediately after the jump
    std::int64_t child_node = -1;     // index into CellTree::nodes, if built
};

/// Exact event-driven record of one cell's trajectory.
struct CellPath {
    std::vector<double> x0;
    double t_end = 0.0;  // simulated up to here (relative time)
    std::vector<JumpRecord> jumps;

    /// Value at relative time t (pure decay past the last recorded jump).
    std::vector<double> value_at(double t, const ToyDrivingSpec& spec) const;
};

/// Exact simulation of a single cell: exponential inter-jump times,
/// deterministic radial decay in between.  Recording stops at the horizon or
/// once the radius falls below stop_radius (0 disables the radius stop).
CellPath simulate_cell(RngState& rng, const ToyDrivingSpec& spec, std::span<const double> x0,
                       double horizon, double stop_radius = 0.0);

struct CellNode {
    std::int64_t parent = -1;
    int child_rank = 0;  // 1-based position in the parent's ranked offspring
    int generation = 0;
    double birth_time = 0.0;  // absolute
    std::vector<double> x0;
    bool expanded = false;
    bool truncated_size = false;  // below the size floor, subtree not built
    bool truncated_gen = false;   // beyond max_gen, subtree not built
    double birth_log_ratio = 0.0; // log(|x0| / parent radius before the jump)
    CellPath path;                // only meaningful when expanded
    std::vector<std::int64_t> children;  // ranked by descending |x0|
};

struct CellTree {
    ToyDrivingSpec spec;
    double horizon = 0.0;
    double size_floor = 0.0;
    int max_gen = 0;
    double stop_radius = 0.0;
    std::vector<CellNode> nodes;  // nodes[0] is the root

    std::string label_of(std::int64_t idx) const;
};

/// Breadth-first construction of the cell system.  Cells below the size
/// floor or beyond max_gen are recorded as truncated leaves; the node budget
/// produces an explicit error rather than silent truncation.
CellTree build_cell_system(RngState& rng, const ToyDrivingSpec& spec, std::span<const double> x0,
                           int max_gen, double size_floor, double horizon,
                           std::size_t node_budget = 10'000'000);

struct GenealogicalMartingale {
    double value = 0.0;            // recorded generation-(n+1) mass plus stand-ins
    double truncated_mass = 0.0;   // contribution of size-truncated leaves (included in value)
    double unrecorded_bound = 0.0; // bound on mass lost to the per-cell radius stop
};

/// Sum over generation-(n+1) cells of |x_u(0)|^omega.  Size-truncated leaves
/// of earlier generations stand in for their unexpanded descendants (their
/// expected mass at any later generation equals their own), which keeps the
/// estimator unbiased up to the reported bound.
GenealogicalMartingale genealogical_martingale(const CellTree& tree, int n, double omega);

/// Tagged-cell log-radius path: Esscher-tilted within-generation dynamics
/// superimposed with generation-change events at the rate of the
/// omega-tilted jump-size measure.
struct SpinePath {
    double xi0 = 0.0;
    double drift = 0.0;  // d xi / dt between events (equals -b)
    double horizon = 0.0;
    std::vector<double> event_times;
    std::vector<double> xi_after;
    std::vector<bool> is_generation;

    double xi_at(double t) const;
    std::vector<double> generation_times() const;
};

/// Requires omega to be a root of the toy cumulant with psi(omega) < 0.
SpinePath sample_spine(RngState& rng, const ToyDrivingSpec& spec, std::span<const double> x0,
                       double omega, double horizon);

/// Alternative spine sampler through the tilted-tree definition: build the
/// cell system and select the generation-(n_max+1) ancestor line with
/// probability proportional to |x_u(0)|^omega.  The tree weight corrects for
/// sampling the tree under the untilted law.
struct SelectionSpine {
    std::vector<std::int64_t> ray;       // node indices, generations 1..n_max+1
    std::vector<double> log_ratios;      // per-step log(|child| / parent radius)
    double tree_weight = 0.0;            // M(n_max) / |x0|^omega
    double truncated_fraction = 0.0;     // truncated weight mass / total
    bool usable = false;                 // truncated_fraction <= 5%
};

SelectionSpine spine_by_selection(RngState& rng, const ToyDrivingSpec& spec,
                                  std::span<const double> x0, double omega, int n_max,
                                  double size_floor);

struct Snapshot {
    // (size vector, generation), ranked by descending norm
    std::vector<std::pair<std::vector<double>, int>> cells;
    int approximate_count = 0;  // cells evaluated past their simulated range
};

/// All cells alive at absolute time t, evaluated at t - b_u.
Snapshot snapshot(const CellTree& tree, double t);

/// Time change of the self-similar reparametrization: phi(t) is the inverse
/// of the trapezoidal accumulation of e^{alpha xi(s)} over the sample path.
struct LampertiClock {
    std::vector<double> s_grid;
    std::vector<double> integral;  // cumulative, integral[0] = 0

    double phi(double t) const;
};

LampertiClock lamperti_clock(std::span<const double> times, std::span<const double> xi_values,
                             double alpha_ss);

/// Newline-delimited JSON export, one node per line.
void write_tree_ndjson(std::ostream& os, const CellTree& tree);

} // namespace gfx

#include "gfxlab/excursion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gfx {

void ExcursionPath::validate() const {
    horizontal.validate();
    vertical.validate();
    if (vertical.dim != 1) throw std::invalid_argument("ExcursionPath: vertical must be scalar");
    if (horizontal.times != vertical.times)
        throw std::invalid_argument("ExcursionPath: parts must share one time grid");
    if (endpoint_x.size() != static_cast<std::size_t>(horizontal.dim))
        throw std::invalid_argument("ExcursionPath: endpoint dimension mismatch");
    if (vertical.scalar(0) != 0.0 || vertical.scalar(vertical.size() - 1) != 0.0)
        throw std::invalid_argument("ExcursionPath: vertical part must vanish at both ends");
    for (std::size_t i = 0; i < vertical.size(); ++i)
        if (vertical.scalar(i) < 0.0)
            throw std::invalid_argument("ExcursionPath: vertical part must be nonnegative");
}

double SubExcursion::norm() const {
    double s = 0.0;
    for (double v : delta) s += v * v;
    return std::sqrt(s);
}

bool CrossingRefiner::hidden_crossing(double v_lo, double v_hi, double level, double dt) const {
    if (rng == nullptr) return false;
    const double d0 = level - v_lo, d1 = level - v_hi;
    if (d0 * d1 <= 0.0) return false;  // already bracketed
    return rng->uniform() < std::exp(-2.0 * d0 * d1 / dt);
}

double CrossingRefiner::refine(double t_lo, double v_lo, double t_hi, double v_hi,
                               double level) const {
    if (rng != nullptr) {
        // Conditional Gaussian bisection: sample the midpoint of the bridge
        // over the bracket and keep the half whose endpoints still straddle
        // the level.  Tracks the crossing to a sub-bracket of width dt/2^depth.
        for (int k = 0; k < depth; ++k) {
            const double tm = 0.5 * (t_lo + t_hi);
            const double sd = 0.5 * std::sqrt(t_hi - t_lo);
            const double vm = 0.5 * (v_lo + v_hi) + sd * rng->gaussian();
            if ((v_lo <= level) == (vm <= level)) {
                t_lo = tm;
                v_lo = vm;
            } else {
                t_hi = tm;
                v_hi = vm;
            }
        }
    }
    if (v_hi == v_lo) return 0.5 * (t_lo + t_hi);
    const double w = (level - v_lo) / (v_hi - v_lo);
    return t_lo + w * (t_hi - t_lo);
}

ExcursionPath sample_gamma_x(RngState& rng, std::span<const double> x, int d, int steps) {
    if (d < 3) throw std::invalid_argument("sample_gamma_x: d >= 3 required");
    if (x.size() != static_cast<std::size_t>(d - 1))
        throw std::invalid_argument("sample_gamma_x: endpoint must lie in R^{d-1}");
    double nx2 = 0.0;
    for (double v : x) nx2 += v * v;
    if (nx2 == 0.0) throw std::invalid_argument("sample_gamma_x: endpoint x must be nonzero");

    const double r = sample_gamma_x_duration(rng, d);
    const double duration = r * nx2;
    ExcursionPath e;
    e.vertical = sample_bessel3_bridge(rng, duration, steps);
    e.horizontal = sample_brownian_bridge(rng, d - 1, x, duration, steps);
    e.endpoint_x.assign(x.begin(), x.end());
    return e;
}

std::vector<std::pair<double, double>> slice_intervals(const PathGrid& vertical, double a,
                                                       const CrossingRefiner& refiner) {
    if (!(a > 0.0)) throw std::invalid_argument("slice_intervals: level must be positive");
    std::vector<std::pair<double, double>> out;
    bool inside = false;
    double t_up = 0.0;
    std::size_t i_up = 0;
    for (std::size_t i = 0; i + 1 < vertical.size(); ++i) {
        const double v0 = vertical.scalar(i), v1 = vertical.scalar(i + 1);
        if (!inside && v0 <= a && v1 > a) {
            t_up = refiner.refine(vertical.times[i], v0, vertical.times[i + 1], v1, a);
            i_up = i;
            inside = true;
        } else if (inside && v0 > a && v1 <= a) {
            const double t_down = refiner.refine(vertical.times[i], v0, vertical.times[i + 1], v1, a);
            // Interior cells may hide dips below the level that split one
            // grid-visible interval into several maximal ones.  The dips
            // matter: an interval spanning most of the duration has its
            // displacement pinched by the bridge pinning, while its split
            // pieces do not, so unresolved dips systematically understate
            // power sums.  Sample them from the bridge-minimum law.
            double seg_start = t_up;
            for (std::size_t j = i_up + 1; refiner.rng != nullptr && j < i; ++j) {
                const double w0 = vertical.scalar(j), w1 = vertical.scalar(j + 1);
                const double dt = vertical.times[j + 1] - vertical.times[j];
                if (refiner.hidden_crossing(w0, w1, a, dt)) {
                    const double w = (w0 - a) / ((w0 - a) + (w1 - a));
                    const double t_dip = vertical.times[j] + w * dt;
                    out.emplace_back(seg_start, t_dip);
                    seg_start = t_dip;
                }
            }
            out.emplace_back(seg_start, t_down);
            inside = false;
        }
    }
    return out;
}

std::vector<SubExcursion> slice(const ExcursionPath& e, double a, const CrossingRefiner& refiner) {
    if (!(a > 0.0)) throw std::invalid_argument("slice: level must be positive");
    const PathGrid& h = e.horizontal;
    std::vector<SubExcursion> out;
    int idx = 0;
    for (const auto& [t_up, t_down] : slice_intervals(e.vertical, a, refiner)) {
        SubExcursion s;
        s.start_time = t_up;
        s.end_time = t_down;
        s.delta = h.interpolate(t_down);
        const auto h_up = h.interpolate(t_up);
        for (int k = 0; k < h.dim; ++k) s.delta[static_cast<std::size_t>(k)] -= h_up[static_cast<std::size_t>(k)];
        s.chrono_index = idx++;
        out.push_back(std::move(s));
    }
    return out;
}

MartingaleValue martingale_value(const ExcursionPath& e, double a, double omega,
                                 double eps_floor, const CrossingRefiner& refiner) {
    if (!(omega > 0.0)) throw std::invalid_argument("martingale_value: omega must be positive");
    if (eps_floor < 0.0) throw std::invalid_argument("martingale_value: eps_floor must be >= 0");
    MartingaleValue mv;
    const auto subs = slice(e, a, refiner);
    mv.hit = !subs.empty();
    for (const auto& s : subs) {
        const double nrm = s.norm();
        if (nrm < eps_floor) {
            ++mv.discarded;
            continue;
        }
        mv.value += std::pow(nrm, omega);
    }
    return mv;
}

std::optional<double> hits_level(const ExcursionPath& e, double a, const CrossingRefiner& refiner) {
    return first_crossing(e.vertical, a, refiner);
}

std::optional<double> first_crossing(const PathGrid& z, double a, const CrossingRefiner& refiner) {
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double v0 = z.scalar(i), v1 = z.scalar(i + 1);
        if (v0 >= a) return z.times[i];  // grid point already at/above the level
        if (v1 >= a) return refiner.refine(z.times[i], v0, z.times[i + 1], v1, a);
        const double dt = z.times[i + 1] - z.times[i];
        if (refiner.hidden_crossing(v0, v1, a, dt)) {
            // crossing inside the interval; split toward the closer endpoint
            const double w = (a - v0) / ((a - v0) + (a - v1));
            return z.times[i] + w * dt;
        }
    }
    return std::nullopt;
}

BismutSample bismut_sample(RngState& rng, int d, double a_max, int steps) {
    if (!(a_max > 0.0)) throw std::invalid_argument("bismut_sample: a_max > 0");
    if (d < 2) throw std::invalid_argument("bismut_sample: d >= 2");
    if (steps < 2) throw std::invalid_argument("bismut_sample: steps >= 2");

    BismutSample b;
    b.height = a_max * rng.uniform();

    auto killed_leg = [&](void) {
        // Kill time of the last coordinate: first passage of a Brownian
        // motion at -A, sampled exactly as A^2/G^2; given the kill time the
        // killed coordinate is a first-passage bridge, i.e. a nonnegative
        // bridge from A to 0 shifted down by A.
        const double g = rng.gaussian();
        const double T = b.height * b.height / (g * g);
        PathGrid z = bessel3_bridge_between(rng, b.height, 0.0, T, steps);
        PathGrid h = brownian_motion_grid(rng, d - 1, z.times);
        std::vector<double> values(z.size() * static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < z.size(); ++i) {
            for (int k = 0; k + 1 < d; ++k) values[i * d + k] = h.values[i * (d - 1) + k];
            values[i * d + (d - 1)] = z.scalar(i) - b.height;
        }
        return PathGrid(d, std::move(z.times), std::move(values));
    };
    b.left = killed_leg();
    b.right = killed_leg();
    return b;
}

std::vector<double> PathSegmentView::horizontal_at(double s) const {
    if (s < 0.0 || s > duration() + 1e-12) throw std::out_of_range("segment time out of range");
    const double t = reversed ? seg_end - s : seg_start + s;
    return path->horizontal.interpolate(std::min(std::max(t, 0.0), path->duration()));
}

double PathSegmentView::vertical_at(double s) const {
    if (s < 0.0 || s > duration() + 1e-12) throw std::out_of_range("segment time out of range");
    const double t = reversed ? seg_end - s : seg_start + s;
    return path->vertical.interpolate(std::min(std::max(t, 0.0), path->duration()))[0];
}

EstimateReport many_to_one_lhs(RngState& rng, std::span<const double> x, int d, double a,
                               const PairFunctional& F, int N, int steps) {
    if (N < 100) throw std::invalid_argument("many_to_one_lhs: N >= 100 required");
    if (!(a > 0.0)) throw std::invalid_argument("many_to_one_lhs: level must be positive");

    std::vector<double> totals(static_cast<std::size_t>(N));
    CrossingRefiner refiner{&rng};
    for (int i = 0; i < N; ++i) {
        const ExcursionPath e = sample_gamma_x(rng, x, d, steps);
        const auto subs = slice(e, a, refiner);
        double total = 0.0;
        for (const auto& s : subs) {
            const PathSegmentView before{&e, 0.0, s.start_time, false};
            const PathSegmentView after{&e, s.end_time, e.duration(), true};
            total += std::pow(s.norm(), static_cast<double>(d)) * F(before, after);
        }
        totals[static_cast<std::size_t>(i)] = total;
    }
    auto r = mean_ci(totals, "many_to_one_lhs");
    r.seed = rng.seed();
    r.stream = rng.stream();
    return r;
}

double no_bubble_check(const ExcursionPath& e, std::span<const double> levels,
                       double min_duration, const CrossingRefiner& refiner) {
    double min_norm = std::numeric_limits<double>::infinity();
    for (double a : levels) {
        for (const auto& s : slice(e, a, refiner)) {
            if (s.end_time - s.start_time <= min_duration) continue;
            min_norm = std::min(min_norm, s.norm());
        }
    }
    return min_norm;
}

void write_subexcursion_csv_header(std::ostream& os, int horizontal_dim) {
    os << "# gfx-lab v1\n";
    os << "replicate,level,start,end";
    for (int k = 0; k < horizontal_dim; ++k) os << ",delta" << k;
    os << "\n";
}

void write_subexcursion_csv_rows(std::ostream& os, int replicate, double level,
                                 std::span<const SubExcursion> subs) {
    for (const auto& s : subs) {
        os << replicate << ',' << level << ',' << s.start_time << ',' << s.end_time;
        for (double v : s.delta) os << ',' << v;
        os << '\n';
    }
}

} // namespace gfx

#include "gfxlab/gfengine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "gfxlab/distributions.hpp"

namespace gfx {

namespace {

double norm_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Unit vector orthogonal to theta, uniform over the admissible directions.
std::vector<double> perp_direction(RngState& rng, std::span<const double> theta) {
    const std::size_t n = theta.size();
    std::vector<double> u(n);
    for (;;) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            u[k] = rng.gaussian();
            dot += u[k] * theta[k];
        }
        double n2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            u[k] -= dot * theta[k];
            n2 += u[k] * u[k];
        }
        if (n2 > 1e-20) {
            const double inv = 1.0 / std::sqrt(n2);
            for (auto& x : u) x *= inv;
            return u;
        }
    }
}

} // namespace

std::vector<double> CellPath::value_at(double t, const ToyDrivingSpec& spec) const {
    if (t < 0.0) throw std::out_of_range("CellPath::value_at: negative time");
    double t_last = 0.0;
    const std::vector<double>* state = &x0;
    for (const auto& j : jumps) {
        if (j.time > t) break;
        t_last = j.time;
        state = &j.state_after;
    }
    const double decay = std::exp(-spec.drift * (t - t_last));
    std::vector<double> out(*state);
    for (auto& v : out) v *= decay;
    return out;
}

CellPath simulate_cell(RngState& rng, const ToyDrivingSpec& spec, std::span<const double> x0,
                       double horizon, double stop_radius) {
    if (spec.n < 2) throw std::invalid_argument("simulate_cell: ambient dimension n >= 2");
    if (x0.size() != static_cast<std::size_t>(spec.n))
        throw std::invalid_argument("simulate_cell: x0 dimension mismatch");
    if (norm_of(x0) == 0.0) throw std::invalid_argument("simulate_cell: x0 must be nonzero");

    CellPath path;
    path.x0.assign(x0.begin(), x0.end());
    std::vector<double> x(path.x0);
    double t = 0.0;
    if (spec.lambda <= 0.0) {
        path.t_end = horizon;
        return path;
    }
    for (;;) {
        const double dt = rng.exponential(spec.lambda);
        if (t + dt > horizon) {
            path.t_end = horizon;
            return path;
        }
        t += dt;
        const double decay = std::exp(-spec.drift * dt);
        for (auto& v : x) v *= decay;
        const double radius = norm_of(x);
        if (stop_radius > 0.0 && radius < stop_radius) {
            path.t_end = t;
            return path;
        }

        // jump: contract by beta and rotate by a uniform angle W towards a
        // uniformly chosen perpendicular direction
        const double w = 2.0 * M_PI * rng.uniform();
        std::vector<double> theta(x);
        for (auto& v : theta) v /= radius;
        const auto u = perp_direction(rng, theta);

        JumpRecord rec;
        rec.time = t;
        rec.angle = w;
        rec.state_after.resize(x.size());
        rec.child.resize(x.size());
        const double cw = std::cos(w), sw = std::sin(w);
        for (std::size_t k = 0; k < x.size(); ++k) {
            rec.state_after[k] = spec.beta * (cw * x[k] + sw * radius * u[k]);
            rec.child[k] = x[k] - rec.state_after[k];
        }
        rec.log_size_ratio = std::log(norm_of(rec.child) / radius);
        x = rec.state_after;
        path.jumps.push_back(std::move(rec));
    }
}

std::string CellTree::label_of(std::int64_t idx) const {
    std::vector<int> parts;
    while (idx > 0) {
        parts.push_back(nodes[static_cast<std::size_t>(idx)].child_rank);
        idx = nodes[static_cast<std::size_t>(idx)].parent;
    }
    std::string s;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (!s.empty()) s += '.';
        s += std::to_string(*it);
    }
    return s;
}

CellTree build_cell_system(RngState& rng, const ToyDrivingSpec& spec, std::span<const double> x0,
                           int max_gen, double size_floor, double horizon,
                           std::size_t node_budget) {
    if (!(size_floor > 0.0)) throw std::invalid_argument("build_cell_system: size_floor > 0");
    if (max_gen < 0) throw std::invalid_argument("build_cell_system: max_gen >= 0");
    if (norm_of(x0) == 0.0) throw std::invalid_argument("build_cell_system: x0 must be nonzero");

    CellTree tree;
    tree.spec = spec;
    tree.horizon = horizon;
    tree.size_floor = size_floor;
    tree.max_gen = max_gen;
    tree.stop_radius = size_floor / (1.0 + spec.beta);

    CellNode root;
    root.x0.assign(x0.begin(), x0.end());
    tree.nodes.push_back(std::move(root));

    std::deque<std::int64_t> queue{0};
    while (!queue.empty()) {
        const std::int64_t idx = queue.front();
        queue.pop_front();

        const double birth = tree.nodes[static_cast<std::size_t>(idx)].birth_time;
        const int gen = tree.nodes[static_cast<std::size_t>(idx)].generation;
        CellPath path = simulate_cell(rng, spec, tree.nodes[static_cast<std::size_t>(idx)].x0,
                                      horizon - birth, tree.stop_radius);
        tree.nodes[static_cast<std::size_t>(idx)].expanded = true;

        // rank offspring by descending norm, ties broken by jump time
        std::vector<std::size_t> order(path.jumps.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::vector<double> norms(path.jumps.size());
        for (std::size_t k = 0; k < norms.size(); ++k) norms[k] = norm_of(path.jumps[k].child);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (norms[a] != norms[b]) return norms[a] > norms[b];
            return path.jumps[a].time < path.jumps[b].time;
        });

        int rank = 0;
        for (std::size_t k : order) {
            ++rank;
            if (tree.nodes.size() >= node_budget)
                throw std::runtime_error("build_cell_system: node budget exhausted");
            CellNode child;
            child.parent = idx;
            child.child_rank = rank;
            child.generation = gen + 1;
            child.birth_time = birth + path.jumps[k].time;
            child.x0 = path.jumps[k].child;
            child.birth_log_ratio = path.jumps[k].log_size_ratio;
            const bool below_floor = norms[k] < size_floor;
            const bool beyond_gen = child.generation > max_gen;
            child.truncated_size = below_floor;
            child.truncated_gen = !below_floor && beyond_gen;
            const std::int64_t child_idx = static_cast<std::int64_t>(tree.nodes.size());
            path.jumps[k].child_node = child_idx;
            tree.nodes.push_back(std::move(child));
            if (!below_floor && !beyond_gen) queue.push_back(child_idx);
        }
        tree.nodes[static_cast<std::size_t>(idx)].children.clear();
        for (std::size_t k : order)
            tree.nodes[static_cast<std::size_t>(idx)].children.push_back(path.jumps[k].child_node);
        // keep jumps chronological in the stored path
        tree.nodes[static_cast<std::size_t>(idx)].path = std::move(path);
    }
    return tree;
}

GenealogicalMartingale genealogical_martingale(const CellTree& tree, int n, double omega) {
    if (n < 0) throw std::invalid_argument("genealogical_martingale: n >= 0");
    if (n > tree.max_gen)
        throw std::runtime_error("genealogical_martingale: tree not expanded deep enough");

    GenealogicalMartingale out;
    std::size_t expanded_upto_n = 0;
    for (const auto& node : tree.nodes) {
        const double mass = std::pow(norm_of(node.x0), omega);
        if (node.generation == n + 1) {
            out.value += mass;
        } else if (node.truncated_size && node.generation <= n) {
            // stands in for its unexpanded descendants at generation n+1
            out.value += mass;
            out.truncated_mass += mass;
        }
        if (node.expanded && node.generation <= n) ++expanded_upto_n;
    }
    out.unrecorded_bound = static_cast<double>(expanded_upto_n) * std::pow(tree.stop_radius, omega);
    return out;
}

double SpinePath::xi_at(double t) const {
    if (t < 0.0 || t > horizon) throw std::out_of_range("SpinePath::xi_at");
    double xi = xi0, t_last = 0.0;
    for (std::size_t i = 0; i < event_times.size() && event_times[i] <= t; ++i) {
        xi = xi_after[i];
        t_last = event_times[i];
    }
    return xi + drift * (t - t_last);
}

std::vector<double> SpinePath::generation_times() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < event_times.size(); ++i)
        if (is_generation[i]) out.push_back(event_times[i]);
    return out;
}

SpinePath sample_spine(RngState& rng, const ToyDrivingSpec& spec, std::span<const double> x0,
                       double omega, double horizon) {
    if (norm_of(x0) == 0.0) throw std::invalid_argument("sample_spine: x0 must be nonzero");
    if (spec.lambda <= 0.0)
        throw std::invalid_argument("sample_spine: jump activity required for a cumulant root");
    auto psi = [&](double q) { return toy_psi(spec, q); };
    const KappaValue k = kappa(LevySystemSpec{spec}, psi, omega);
    if (k.divergent || std::abs(k.value) > 1e-9)
        throw std::invalid_argument("sample_spine: omega is not a root of the cumulant");
    if (!(psi(omega) < 0.0)) throw std::invalid_argument("sample_spine: psi(omega) < 0 required");

    // Tilting the within-generation jump measure scales its rate by
    // beta^omega and keeps the angle uniform; generation changes arrive at
    // the mass of the omega-tilted child-size measure and draw the angle
    // from the tilted law.
    const double own_rate = spec.lambda * std::pow(spec.beta, omega);
    const double gen_rate = jump_integral(LevySystemSpec{spec}, omega, {}).value;
    const double b2 = spec.beta * spec.beta;
    const double bound = std::pow(1.0 + spec.beta, omega);

    auto tilted_angle = [&]() {
        for (;;) {
            const double w = 2.0 * M_PI * rng.uniform();
            const double m = std::pow(1.0 + b2 - 2.0 * spec.beta * std::cos(w), 0.5 * omega);
            if (rng.uniform() * bound <= m) return w;
        }
    };

    SpinePath sp;
    sp.xi0 = std::log(norm_of(x0));
    sp.drift = -spec.drift;
    sp.horizon = horizon;
    double t = 0.0, xi = sp.xi0;
    for (;;) {
        const double dt_own = rng.exponential(own_rate);
        const double dt_gen = rng.exponential(gen_rate);
        const bool generation = dt_gen < dt_own;
        const double dt = generation ? dt_gen : dt_own;
        if (t + dt > horizon) break;
        t += dt;
        xi += sp.drift * dt;
        if (generation) {
            const double w = tilted_angle();
            xi += 0.5 * std::log(1.0 + b2 - 2.0 * spec.beta * std::cos(w));
        } else {
            xi += std::log(spec.beta);
        }
        sp.event_times.push_back(t);
        sp.xi_after.push_back(xi);
        sp.is_generation.push_back(generation);
    }
    return sp;
}

SelectionSpine spine_by_selection(RngState& rng, const ToyDrivingSpec& spec,
                                  std::span<const double> x0, double omega, int n_max,
                                  double size_floor) {
    auto psi = [&](double q) { return toy_psi(spec, q); };
    const KappaValue k = kappa(LevySystemSpec{spec}, psi, omega);
    if (k.divergent || std::abs(k.value) > 1e-9)
        throw std::invalid_argument("spine_by_selection: omega is not a root of the cumulant");

    // horizon long enough that the drift alone pushes every followed cell
    // below the recording radius before it is reached
    const double x0_norm = norm_of(x0);
    const double horizon = (std::log((1.0 + spec.beta) * x0_norm / size_floor) + 20.0) / spec.drift;
    const CellTree tree = build_cell_system(rng, spec, x0, n_max, size_floor, horizon);

    double recorded = 0.0, truncated = 0.0;
    std::vector<std::pair<std::int64_t, double>> leaves;  // generation n_max+1 weights
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tree.nodes.size()); ++i) {
        const auto& node = tree.nodes[static_cast<std::size_t>(i)];
        const double mass = std::pow(norm_of(node.x0), omega);
        if (node.generation == n_max + 1) {
            leaves.emplace_back(i, mass);
            recorded += mass;
        } else if (node.truncated_size && node.generation <= n_max) {
            truncated += mass;
        }
    }

    SelectionSpine out;
    const double total = recorded + truncated;
    out.tree_weight = total / std::pow(x0_norm, omega);
    out.truncated_fraction = total > 0.0 ? truncated / total : 1.0;
    out.usable = out.truncated_fraction <= 0.05 && recorded > 0.0;
    if (!out.usable) return out;

    double pick = rng.uniform() * recorded;
    std::int64_t chosen = leaves.back().first;
    for (const auto& [idx, w] : leaves) {
        pick -= w;
        if (pick <= 0.0) {
            chosen = idx;
            break;
        }
    }
    // walk up to generation 1
    std::vector<std::int64_t> ray;
    for (std::int64_t i = chosen; i > 0; i = tree.nodes[static_cast<std::size_t>(i)].parent)
        ray.push_back(i);
    std::reverse(ray.begin(), ray.end());
    out.ray = ray;
    for (std::int64_t i : ray) out.log_ratios.push_back(tree.nodes[static_cast<std::size_t>(i)].birth_log_ratio);
    return out;
}

Snapshot snapshot(const CellTree& tree, double t) {
    if (t < 0.0 || t > tree.horizon) throw std::invalid_argument("snapshot: time beyond horizon");
    Snapshot snap;
    for (const auto& node : tree.nodes) {
        if (node.birth_time > t) continue;
        const double rel = t - node.birth_time;
        std::vector<double> value;
        if (node.expanded) {
            value = node.path.value_at(rel, tree.spec);
            if (rel > node.path.t_end) ++snap.approximate_count;
        } else {
            // unexpanded leaf: pure decay approximation, flagged
            value = node.x0;
            const double decay = std::exp(-tree.spec.drift * rel);
            for (auto& v : value) v *= decay;
            ++snap.approximate_count;
        }
        snap.cells.emplace_back(std::move(value), node.generation);
    }
    std::sort(snap.cells.begin(), snap.cells.end(), [](const auto& a, const auto& b) {
        return norm_of(a.first) > norm_of(b.first);
    });
    return snap;
}

double LampertiClock::phi(double t) const {
    if (t < 0.0 || t > integral.back()) throw std::out_of_range("LampertiClock::phi");
    std::size_t lo = 0, hi = integral.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (integral[mid] <= t) lo = mid; else hi = mid;
    }
    const double seg = integral[hi] - integral[lo];
    if (seg <= 0.0) return s_grid[lo];
    return s_grid[lo] + (t - integral[lo]) * (s_grid[hi] - s_grid[lo]) / seg;
}

LampertiClock lamperti_clock(std::span<const double> times, std::span<const double> xi_values,
                             double alpha_ss) {
    if (times.size() != xi_values.size() || times.size() < 2)
        throw std::invalid_argument("lamperti_clock: need matching grids with >= 2 points");
    LampertiClock clock;
    clock.s_grid.assign(times.begin(), times.end());
    clock.integral.resize(times.size());
    clock.integral[0] = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double f0 = std::exp(alpha_ss * xi_values[i - 1]);
        const double f1 = std::exp(alpha_ss * xi_values[i]);
        clock.integral[i] = clock.integral[i - 1] + 0.5 * (f0 + f1) * (times[i] - times[i - 1]);
    }
    return clock;
}

void write_tree_ndjson(std::ostream& os, const CellTree& tree) {
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tree.nodes.size()); ++i) {
        const auto& node = tree.nodes[static_cast<std::size_t>(i)];
        os << "{\"label\":\"" << tree.label_of(i) << "\",\"gen\":" << node.generation
           << ",\"birth\":" << node.birth_time << ",\"x0\":[";
        for (std::size_t k = 0; k < node.x0.size(); ++k) {
            if (k) os << ',';
            os << node.x0[k];
        }
        os << "],\"truncated\":" << ((node.truncated_size || node.truncated_gen) ? "true" : "false")
           << "}\n";
    }
}

} // namespace gfx

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "gfxlab/gfengine.hpp"
#include "gfxlab/special.hpp"
#include "gfxlab/stats.hpp"

using namespace gfx;

namespace {
const ToyDrivingSpec kSpec{2, 1.0, 0.5, 0.25};
const std::vector<double> kX0{1.0, 0.0};

double norm2d(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}
} // namespace

TEST_CASE("cell path without jumps is pure radial decay") {
    RngState rng(601, 0);
    const ToyDrivingSpec still{2, 0.0, 0.5, 0.25};
    const CellPath path = simulate_cell(rng, still, kX0, 4.0);
    CHECK(path.jumps.empty());
    const auto v = path.value_at(2.0, still);
    CHECK(v[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(v[1] == 0.0);
}

TEST_CASE("jump counts are Poisson over a fixed horizon") {
    RngState rng(602, 0);
    const double T = 2.0;
    const int n = 10000;
    std::vector<int> counts(32, 0);
    for (int i = 0; i < n; ++i) {
        const CellPath path = simulate_cell(rng, kSpec, kX0, T);
        const std::size_t k = std::min<std::size_t>(path.jumps.size(), counts.size() - 1);
        ++counts[k];
    }
    // chi-square against Poisson(lambda T) with merged tail
    const double mean = kSpec.lambda * T;
    double stat = 0.0;
    int dof = -1;
    double tail_p = 1.0, tail_o = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double pk = std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
        if (pk * n < 10.0) {
            tail_o += counts[k];
            continue;
        }
        tail_p -= pk;
        stat += (counts[k] - n * pk) * (counts[k] - n * pk) / (n * pk);
        ++dof;
    }
    stat += (tail_o - n * tail_p) * (tail_o - n * tail_p) / (n * tail_p);
    ++dof;
    CHECK(stat < chi2_quantile(0.999, dof));
}

TEST_CASE("per-event jump algebra and conservation hold exactly") {
    RngState rng(603, 0);
    const CellPath path = simulate_cell(rng, kSpec, kX0, 6.0);
    REQUIRE(!path.jumps.empty());
    for (const auto& j : path.jumps) {
        std::vector<double> pre(j.state_after.size());
        for (std::size_t k = 0; k < pre.size(); ++k) pre[k] = j.state_after[k] + j.child[k];
        const double r_pre = norm2d(pre);
        const double expected =
            r_pre * std::sqrt(1.0 + kSpec.beta * kSpec.beta -
                              2.0 * kSpec.beta * std::cos(j.angle));
        CHECK(norm2d(j.child) == doctest::Approx(expected).epsilon(1e-10));
        CHECK(norm2d(j.state_after) == doctest::Approx(kSpec.beta * r_pre).epsilon(1e-10));
    }
}

TEST_CASE("tree construction honours max_gen and the size floor") {
    RngState rng(604, 0);
    const CellTree tree = build_cell_system(rng, kSpec, kX0, 0, 1e-3, 32.0);
    CHECK(tree.nodes[0].expanded);
    for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
        CHECK(tree.nodes[i].generation == 1);
        CHECK_FALSE(tree.nodes[i].expanded);
    }
    // children ranked by descending norm
    const auto& children = tree.nodes[0].children;
    for (std::size_t k = 1; k < children.size(); ++k) {
        CHECK(norm2d(tree.nodes[static_cast<std::size_t>(children[k - 1])].x0) >=
              norm2d(tree.nodes[static_cast<std::size_t>(children[k])].x0));
    }
    CHECK_THROWS_AS(build_cell_system(rng, kSpec, kX0, 3, 1e-4, 32.0, 10), std::runtime_error);
}

TEST_CASE("first-generation sizes match a direct single-cell simulation") {
    const int n = 4000;
    const double s = 0.25;
    std::vector<double> from_tree(n), direct(n);
    for (int i = 0; i < n; ++i) {
        RngState ra(605, static_cast<std::uint64_t>(i));
        const CellTree tree = build_cell_system(ra, kSpec, kX0, 0, 1e-3, 32.0);
        int count = 0;
        for (std::size_t k = 1; k < tree.nodes.size(); ++k)
            if (norm2d(tree.nodes[k].x0) >= s) ++count;
        from_tree[static_cast<std::size_t>(i)] = count;

        RngState rb(606, static_cast<std::uint64_t>(i));
        const CellPath path = simulate_cell(rb, kSpec, kX0, 32.0, 1e-3 / 1.5);
        int count2 = 0;
        for (const auto& j : path.jumps)
            if (norm2d(j.child) >= s) ++count2;
        direct[static_cast<std::size_t>(i)] = count2;
    }
    CHECK(agree_3sigma(mean_ci(from_tree), mean_ci(direct)));
}

TEST_CASE("genealogical martingale: depth guard and light ensemble") {
    RngState rng(607, 0);
    const CellTree tree = build_cell_system(rng, kSpec, kX0, 2, 1e-3, 32.0);
    CHECK_THROWS_AS(genealogical_martingale(tree, 5, 2.0), std::runtime_error);
    const auto count = genealogical_martingale(tree, 0, 0.0);
    CHECK(count.value >= 1.0);  // omega = 0 counts generation-1 cells

    const int n = 800;
    std::vector<double> m0(n), m1(n);
    for (int i = 0; i < n; ++i) {
        RngState r(608, static_cast<std::uint64_t>(i));
        const CellTree t = build_cell_system(r, kSpec, kX0, 2, 1e-3, 32.0);
        m0[static_cast<std::size_t>(i)] = genealogical_martingale(t, 0, 2.0).value;
        m1[static_cast<std::size_t>(i)] = genealogical_martingale(t, 1, 2.0).value;
    }
    auto r0 = mean_ci(m0), r1 = mean_ci(m1);
    CHECK(std::abs(r0.estimate - 1.0) < 3.0 * r0.std_error);
    CHECK(std::abs(r1.estimate - 1.0) < 3.0 * r1.std_error);
}

TEST_CASE("spine sampler: guards and generation-change rate") {
    RngState rng(609, 0);
    CHECK_THROWS_AS(sample_spine(rng, kSpec, kX0, 1.7, 10.0), std::invalid_argument);
    const ToyDrivingSpec no_jumps{2, 0.0, 0.5, 0.25};
    CHECK_THROWS_AS(sample_spine(rng, no_jumps, kX0, 2.0, 10.0), std::invalid_argument);

    std::vector<double> gaps;
    std::uint64_t stream = 0;
    while (gaps.size() < 5000) {
        RngState r(610, stream++);
        const SpinePath sp = sample_spine(r, kSpec, kX0, 2.0, 30.0);
        const auto times = sp.generation_times();
        double prev = 0.0;
        for (std::size_t k = 0; k < times.size() && k < 3; ++k) {
            gaps.push_back(times[k] - prev);
            prev = times[k];
        }
    }
    // rate -psi(2) = 1.25 for the designed toy
    CHECK(ks_test(gaps, [](double x) { return exponential_cdf(x, 1.25); }).pass);
}

TEST_CASE("spine log-radius drifts at -b between events") {
    RngState rng(611, 0);
    const SpinePath sp = sample_spine(rng, kSpec, kX0, 2.0, 5.0);
    const double t_probe = sp.event_times.empty() ? 1.0 : 0.5 * sp.event_times[0];
    CHECK(sp.xi_at(t_probe) == doctest::Approx(-kSpec.drift * t_probe).epsilon(1e-12));
}

TEST_CASE("selection spine agrees with the direct spine on the first increment") {
    // means with importance weights, then a distribution-level resampling check
    const int trees = 12000;
    std::vector<double> sel_vals, sel_weights;
    RngState rng(612, 0);
    for (int i = 0; i < trees; ++i) {
        const SelectionSpine s = spine_by_selection(rng, kSpec, kX0, 2.0, 0, 1e-4);
        if (!s.usable) continue;
        sel_vals.push_back(s.log_ratios[0]);
        sel_weights.push_back(s.tree_weight);
    }
    REQUIRE(sel_vals.size() > 10000);
    auto sel = weighted_mean_ci(sel_vals, sel_weights, "selection_increment");

    const int n_direct = 40000;
    std::vector<double> direct;
    std::uint64_t stream = 0;
    while (direct.size() < static_cast<std::size_t>(n_direct)) {
        RngState r(613, stream++);
        const SpinePath sp = sample_spine(r, kSpec, kX0, 2.0, 20.0);
        double prev_xi = sp.xi0;
        double prev_t = 0.0;
        for (std::size_t k = 0; k < sp.event_times.size(); ++k) {
            if (sp.is_generation[k]) {
                direct.push_back(sp.xi_after[k] - (prev_xi + sp.drift * (sp.event_times[k] - prev_t)));
                break;  // first generation jump only
            }
            prev_xi = sp.xi_after[k];
            prev_t = sp.event_times[k];
        }
    }
    auto dir = mean_ci(direct, "direct_increment");
    CHECK(agree_3sigma(sel, dir));

    // weighted resampling for a two-sample law comparison
    RngState rs(614, 0);
    double wtot = 0.0;
    for (double w : sel_weights) wtot += w;
    std::vector<double> resampled(20000);
    for (auto& v : resampled) {
        double pick = rs.uniform() * wtot;
        std::size_t j = 0;
        while (j + 1 < sel_weights.size() && (pick -= sel_weights[j]) > 0.0) ++j;
        v = sel_vals[j];
    }
    std::vector<double> direct_sub(direct.begin(), direct.begin() + 20000);
    CHECK(ks_two_sample(resampled, direct_sub).pass);
}

TEST_CASE("huge tilts concentrate the selection on the largest child") {
    RngState rng(615, 0);
    // omega = 50 is far from a root, so bypass the root check by selecting
    // manually over the first generation with the tilted weights
    int argmax_picked = 0;
    const int trials = 300;
    for (int i = 0; i < trials; ++i) {
        const CellTree tree = build_cell_system(rng, kSpec, kX0, 0, 1e-3, 32.0);
        double total = 0.0, best = -1.0;
        std::size_t best_idx = 0;
        std::vector<double> w;
        for (std::size_t k = 1; k < tree.nodes.size(); ++k) {
            const double nrm = norm2d(tree.nodes[k].x0);
            w.push_back(std::pow(nrm, 50.0));
            total += w.back();
            if (nrm > best) {
                best = nrm;
                best_idx = k - 1;
            }
        }
        double pick = rng.uniform() * total;
        std::size_t chosen = 0;
        while (chosen + 1 < w.size() && (pick -= w[chosen]) > 0.0) ++chosen;
        if (chosen == best_idx) ++argmax_picked;
    }
    CHECK(argmax_picked >= trials - 10);
}

TEST_CASE("snapshot structure, ordering and temporal constancy") {
    RngState rng(616, 0);
    const CellTree tree = build_cell_system(rng, kSpec, kX0, 20, 1e-4, 1.0);
    const Snapshot at0 = snapshot(tree, 0.0);
    REQUIRE(at0.cells.size() == 1);
    CHECK(at0.cells[0].first[0] == 1.0);
    CHECK(at0.cells[0].second == 0);
    CHECK_THROWS_AS(snapshot(tree, 5.0), std::invalid_argument);

    const Snapshot later = snapshot(tree, 0.9);
    for (std::size_t i = 1; i < later.cells.size(); ++i)
        CHECK(norm2d(later.cells[i - 1].first) >= norm2d(later.cells[i].first));

    const int n = 1500;
    std::vector<double> mass_early(n), mass_late(n);
    for (int i = 0; i < n; ++i) {
        RngState r(617, static_cast<std::uint64_t>(i));
        const CellTree t = build_cell_system(r, kSpec, kX0, 20, 1e-4, 1.0);
        auto total = [&](double at) {
            double s = 0.0;
            for (const auto& [vec, gen] : snapshot(t, at).cells) {
                (void)gen;
                s += norm2d(vec) * norm2d(vec);
            }
            return s;
        };
        mass_early[static_cast<std::size_t>(i)] = total(0.3);
        mass_late[static_cast<std::size_t>(i)] = total(0.9);
    }
    auto r1 = mean_ci(mass_early), r2 = mean_ci(mass_late);
    CHECK(std::abs(r1.estimate - 1.0) < 3.0 * r1.std_error);
    CHECK(std::abs(r2.estimate - 1.0) < 3.0 * r2.std_error);
}

TEST_CASE("lamperti clock closed forms") {
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
    const std::vector<double> zeros(4, 0.0);
    const LampertiClock ident = lamperti_clock(times, zeros, 1.3);
    CHECK(ident.phi(1.7) == doctest::Approx(1.7).epsilon(1e-12));

    const std::vector<double> wavy{1.0, -2.0, 0.5, 3.0};
    const LampertiClock also_ident = lamperti_clock(times, wavy, 0.0);
    CHECK(also_ident.phi(0.9) == doctest::Approx(0.9).epsilon(1e-12));

    const double c = 0.7, alpha = 1.1;
    const std::vector<double> consts(4, c);
    const LampertiClock scaled = lamperti_clock(times, consts, alpha);
    CHECK(scaled.phi(1.0) == doctest::Approx(std::exp(-alpha * c)).epsilon(1e-12));
}

TEST_CASE("tree export is valid newline-delimited json") {
    RngState rng(618, 0);
    const CellTree tree = build_cell_system(rng, kSpec, kX0, 1, 1e-2, 8.0);
    std::ostringstream os;
    write_tree_ndjson(os, tree);
    std::istringstream is(os.str());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(is, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("label"));
        CHECK(j.contains("gen"));
        CHECK(j.contains("x0"));
        ++lines;
    }
    CHECK(lines == tree.nodes.size());
}

#include "gfxlab/verify.hpp"

#include <chrono>
#include <cmath>

#include "gfxlab/bridges.hpp"
#include "gfxlab/cumulant.hpp"
#include "gfxlab/distributions.hpp"
#include "gfxlab/excursion.hpp"
#include "gfxlab/gfengine.hpp"
#include "gfxlab/halfspace.hpp"
#include "gfxlab/parallel.hpp"
#include "gfxlab/quadrature.hpp"
#include "gfxlab/special.hpp"

namespace gfx {

namespace {

constexpr std::uint64_t kStreamBase = 1ULL << 24;
constexpr std::uint64_t kRetrySeedOffset = 0x9E3779B97F4A7C15ULL;

class Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

double vec_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

CheckItem estimate_vs_target(const std::string& name, const std::string& identity,
                             EstimateReport est, double target, double extra_abs_tol = 0.0) {
    CheckItem item;
    item.name = name;
    item.identity = identity;
    item.target = target;
    const double tol = std::max(3.0 * est.std_error, extra_abs_tol);
    item.tolerance = tol;
    item.pass = std::abs(est.estimate - target) <= tol;
    item.estimate = std::move(est);
    return item;
}

CheckItem estimates_agree(const std::string& name, const std::string& identity,
                          const EstimateReport& a, const EstimateReport& b) {
    CheckItem item;
    item.name = name;
    item.identity = identity;
    item.pass = agree_3sigma(a, b);
    item.estimate = a;
    item.target = b.estimate;
    item.tolerance = 3.0 * std::hypot(a.std_error, b.std_error);
    item.extras["other_se"] = b.std_error;
    return item;
}

CheckItem scalar_vs_target(const std::string& name, const std::string& identity, double value,
                           double target, double abs_tol) {
    CheckItem item;
    item.name = name;
    item.identity = identity;
    item.target = target;
    item.tolerance = abs_tol;
    item.pass = std::abs(value - target) <= abs_tol;
    item.extras["value"] = value;
    return item;
}

/// Distributional tests get one retry with a fresh seed; both runs reported.
template <typename Fn>
CheckItem stat_item_with_retry(const std::string& name, const std::string& identity,
                               std::uint64_t seed, Fn&& run) {
    StatTestResult first = run(seed);
    CheckItem item;
    item.name = name;
    item.identity = identity;
    if (first.pass) {
        item.test = std::move(first);
        item.pass = true;
        return item;
    }
    StatTestResult second = run(seed + kRetrySeedOffset);
    item.extras["retried"] = 1.0;
    item.extras["first_statistic"] = first.statistic;
    item.extras["first_p_proxy"] = first.p_proxy;
    item.pass = second.pass;
    item.test = std::move(second);
    return item;
}

} // namespace

namespace {

/// Duration strata for the conditioned excursion: the duration factor r has
/// an inverse-gamma tail P(r > t) ~ t^{-d/2}, which puts the sliced power
/// sum in the infinite-variance regime; stratifying r restores a finite
/// standard error without touching the estimand.
struct DurationStrata {
    std::vector<double> r_hi;       // upper bounds, increasing
    std::vector<double> prob;       // stratum probabilities
    std::vector<std::size_t> alloc; // replicates per stratum
    std::vector<std::size_t> offset;
    double beyond_prob = 0.0;       // mass above the last bound (reported)

    std::size_t stratum_of(std::size_t item) const {
        std::size_t b = 0;
        while (b + 1 < offset.size() && item >= offset[b + 1]) ++b;
        return b;
    }
};

DurationStrata make_duration_strata(int d, std::size_t n_total) {
    DurationStrata st;
    for (double b = 2.0; b < 1e7; b *= 4.0) st.r_hi.push_back(b);
    auto cdf_r = [&](double r) { return gamma_q(0.5 * d, 0.5 / r); };  // P(R <= r)
    double prev = 0.0;
    for (double b : st.r_hi) {
        const double c = cdf_r(b);
        st.prob.push_back(c - prev);
        prev = c;
    }
    st.beyond_prob = 1.0 - prev;
    const std::size_t K = st.r_hi.size();
    const std::size_t floor_alloc = std::min<std::size_t>(300, n_total / (2 * K));
    st.alloc.assign(K, 0);
    std::size_t used = 0;
    for (std::size_t b = 0; b < K; ++b) {
        st.alloc[b] = std::max(floor_alloc,
                               static_cast<std::size_t>(st.prob[b] * static_cast<double>(n_total)));
        used += st.alloc[b];
    }
    // adjust the bulk stratum so the total replicate count is exactly n_total
    std::size_t bulk = 0;
    for (std::size_t b = 1; b < K; ++b)
        if (st.alloc[b] > st.alloc[bulk]) bulk = b;
    if (used > n_total)
        st.alloc[bulk] -= std::min(st.alloc[bulk] - floor_alloc, used - n_total);
    else
        st.alloc[bulk] += n_total - used;
    st.offset.assign(K, 0);
    for (std::size_t b = 1; b < K; ++b) st.offset[b] = st.offset[b - 1] + st.alloc[b - 1];
    return st;
}

double sample_r_in_stratum(RngState& rng, int d, double cdf_lo, double cdf_hi) {
    const double g = cdf_lo + rng.uniform() * (cdf_hi - cdf_lo);
    // P(R <= r) = Q(d/2, 1/(2r)); invert through the gamma quantile of s = 1/r
    const double s = gamma_quantile(0.5 * d, 0.5, 1.0 - g);
    return 1.0 / s;
}

EstimateReport stratified_estimate(const DurationStrata& st,
                                   const std::vector<std::vector<double>>& per_stratum,
                                   const std::string& name) {
    EstimateReport est;
    est.name = name;
    double mean = 0.0, var = 0.0;
    std::size_t n = 0;
    for (std::size_t b = 0; b < st.prob.size(); ++b) {
        const auto& vals = per_stratum[b];
        n += vals.size();
        if (vals.empty()) continue;
        const auto m = mean_ci(vals);
        mean += st.prob[b] * m.estimate;
        var += st.prob[b] * st.prob[b] * m.std_error * m.std_error;
    }
    est.estimate = mean;
    est.n = n;
    est.std_error = std::sqrt(var);
    est.ci_low = mean - 3.0 * est.std_error;
    est.ci_high = mean + 3.0 * est.std_error;
    est.diagnostics["beyond_stratification_prob"] = st.beyond_prob;
    return est;
}

} // namespace

RunReport run_martingale(const VerifyOptions& opts, const MartingaleParams& p) {
    Stopwatch watch;
    RunReport rep;
    rep.subcommand = "verify-martingale";
    rep.seed = opts.seed;
    rep.threads = opts.threads;
    rep.config = {{"d", p.d},         {"x", p.x},     {"omega", p.omega}, {"levels", p.levels},
                  {"N", p.N},         {"steps", p.steps}, {"eps_floor", p.eps_floor},
                  {"seed", opts.seed}};
    if (p.d != 3 || p.omega != 3.0)
        throw std::invalid_argument("run_martingale: the conditional estimator is built for "
                                    "d = 3 with the martingale exponent omega = d");

    const std::size_t L = p.levels.size();
    const std::size_t N = static_cast<std::size_t>(p.N);
    const double xnorm = vec_norm(p.x);
    const double x2 = xnorm * xnorm;
    const double target = std::pow(xnorm, p.omega);

    // The horizontal displacement of a sub-excursion is Gaussian given the
    // vertical part (bridge increment), so its power mean is integrated
    // analytically; the duration is sampled by strata.
    const DurationStrata st = make_duration_strata(p.d, N);
    const std::size_t K = st.prob.size();
    auto cdf_r = [&](double r) { return gamma_q(0.5 * p.d, 0.5 / r); };

    std::vector<std::vector<std::vector<double>>> values(
        L, std::vector<std::vector<double>>(K));
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t b = 0; b < K; ++b) values[l][b].resize(st.alloc[b]);
    std::vector<std::vector<double>> interval_counts(K);
    for (std::size_t b = 0; b < K; ++b) interval_counts[b].resize(st.alloc[b]);

    const std::size_t n_total = st.offset.back() + st.alloc.back();
    run_chunked<int>(n_total, 64, opts.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t b = st.stratum_of(i);
            const std::size_t within = i - st.offset[b];
            RngState rng(opts.seed, kStreamBase + i);
            const double c_lo = b == 0 ? 0.0 : cdf_r(st.r_hi[b - 1]);
            const double r = sample_r_in_stratum(rng, p.d, c_lo, c_lo + st.prob[b]);
            const double D = r * x2;
            const PathGrid vertical = sample_bessel3_bridge(rng, D, p.steps);
            CrossingRefiner refiner{&rng};
            double count = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                double rb = 0.0;
                for (const auto& [ts, te] : slice_intervals(vertical, p.levels[l], refiner)) {
                    const double len = te - ts;
                    const double mu = len / D * xnorm;
                    const double sig = std::sqrt(len * (D - len) / D);
                    rb += gaussian2d_abs_moment3(mu, sig);
                    count += 1.0;
                }
                values[l][b][within] = rb;
            }
            interval_counts[b][within] = count;
        }
        return 0;
    });

    std::vector<EstimateReport> per_level;
    const double mean_intervals = stratified_estimate(st, interval_counts, "intervals").estimate;
    for (std::size_t l = 0; l < L; ++l) {
        auto est = stratified_estimate(st, values[l], "martingale_mean");
        est.seed = opts.seed;
        // the size floor only removes mass bounded by eps^omega per interval
        est.diagnostics["floor_tail_bound"] =
            std::pow(p.eps_floor, p.omega) * mean_intervals;
        per_level.push_back(est);
        rep.items.push_back(estimate_vs_target(
            "A1.level-" + std::to_string(p.levels[l]).substr(0, 4),
            "mean sliced power sum equals |x|^d under the conditioned excursion law",
            est, target, 0.05));
    }
    if (L >= 2) {
        rep.items.push_back(estimates_agree("A1.constancy",
                                            "sliced power-sum mean is constant across levels",
                                            per_level[0], per_level[1]));
    }

    // duration-density normalization, by quadrature
    {
        auto q = integrate_upper_infinite(
            [&](double t) { return gamma_x_duration_density(t, p.d); }, 0.0, 1e-13);
        rep.items.push_back(scalar_vs_target("A2.duration-normalization",
                                             "conditioned-excursion duration density integrates to 1",
                                             q.value, 1.0, 1e-10));
        auto q2 = integrate_upper_infinite(
            [&](double t) {
                return std::exp(-0.5 / t) /
                       (2.0 * std::pow(2.0 * M_PI, 0.5 * p.d) * std::pow(t, 0.5 * p.d + 1.0));
            },
            0.0, 1e-13);
        const double closed = 0.5 * std::exp(-0.5 * p.d * std::log(M_PI) + std::lgamma(0.5 * p.d));
        rep.items.push_back(scalar_vs_target(
            "A2.normalization-constant",
            "endpoint-disintegration normalization integral matches its closed form", q2.value,
            closed, 1e-8));
    }
    rep.wall_seconds = watch.seconds();
    return rep;
}

RunReport run_spine(const VerifyOptions& opts, const SpineMarginalParams& p) {
    Stopwatch watch;
    RunReport rep;
    rep.subcommand = "verify-spine";
    rep.seed = opts.seed;
    rep.threads = opts.threads;
    rep.config = {{"d", p.d}, {"a", p.a}, {"N", p.N}, {"seed", opts.seed}};

    auto draw_components = [&](std::uint64_t seed, double a) {
        std::vector<double> comp(static_cast<std::size_t>(p.N));
        std::vector<double> norm_scaled(static_cast<std::size_t>(p.N));
        RngState rng(seed, 3 * kStreamBase);
        for (int i = 0; i < p.N; ++i) {
            auto v = spine_size_brownian(rng, p.d, a);
            comp[static_cast<std::size_t>(i)] = v[0];
            norm_scaled[static_cast<std::size_t>(i)] = vec_norm(v) / a;
        }
        return std::pair{comp, norm_scaled};
    };

    rep.items.push_back(stat_item_with_retry(
        "A3.cauchy-ks", "spine size at height a is isotropic Cauchy with scale a", opts.seed,
        [&](std::uint64_t seed) {
            auto [comp, unused] = draw_components(seed, p.a);
            (void)unused;
            return ks_test(comp, [&](double x) { return cauchy_cdf(x, 0.0, p.a); }, "cauchy_ks");
        }));

    rep.items.push_back(stat_item_with_retry(
        "A3.scale", "spine-size law scales linearly in the height", opts.seed,
        [&](std::uint64_t seed) {
            auto [c1, n1] = draw_components(seed, p.a);
            auto [c2, n2] = draw_components(seed + 1, 2.0 * p.a);
            (void)c1;
            (void)c2;
            return ks_two_sample(n1, n2, "scale_ks");
        }));

    rep.wall_seconds = watch.seconds();
    return rep;
}

RunReport run_spine_stable(const VerifyOptions& opts, const SpineStableParams& p) {
    Stopwatch watch;
    RunReport rep;
    rep.subcommand = "verify-spine-stable";
    rep.seed = opts.seed;
    rep.threads = opts.threads;
    rep.config = {{"d", p.d}, {"alpha", p.alpha}, {"a", p.a}, {"N", p.N}, {"seed", opts.seed}};

    const int dim = p.d - 1;
    auto target_cf = [&](std::span<const double> u) {
        double n2 = 0.0;
        for (double v : u) n2 += v * v;
        const double mod = std::pow(std::sqrt(n2), 0.5 * p.alpha);
        return std::complex<double>(std::exp(-p.a * std::sqrt(2.0) * mod), 0.0);
    };
    std::vector<std::vector<double>> grid;
    for (double u : p.u_values) {
        std::vector<double> e1(static_cast<std::size_t>(dim), 0.0);
        e1[0] = u;
        grid.push_back(e1);
    }

    rep.items.push_back(stat_item_with_retry(
        "A4.cf", "stable spine size matches the subordinated characteristic function",
        opts.seed, [&](std::uint64_t seed) {
            RngState rng(seed, 4 * kStreamBase);
            std::vector<double> samples(static_cast<std::size_t>(p.N) * dim);
            for (int i = 0; i < p.N; ++i) {
                auto v = spine_size_stable(rng, p.d, p.alpha, p.a);
                for (int k = 0; k < dim; ++k) samples[static_cast<std::size_t>(i) * dim + k] = v[static_cast<std::size_t>(k)];
            }
            return cf_distance(samples, dim, target_cf, grid, "stable_cf");
        }));

    rep.wall_seconds = watch.seconds();
    return rep;
}

RunReport run_kappa(const VerifyOptions& opts, const KappaParams& p) {
    Stopwatch watch;
    RunReport rep;
    rep.subcommand = "kappa";
    rep.seed = opts.seed;
    rep.threads = opts.threads;
    rep.config = {{"lambda", p.lambda}, {"beta", p.beta},   {"drift", p.drift},
                  {"bracket_lo", p.bracket_lo}, {"bracket_hi", p.bracket_hi},
                  {"stable_alpha", p.stable_alpha}, {"stable_d", p.stable_d},
                  {"stable_q", p.stable_q}, {"window_x", p.window_x}, {"seed", opts.seed}};

    const ToyCP toy{2, p.lambda, p.beta, p.drift};
    const LevySystemSpec toy_spec{toy};
    auto psi = [&](double q) { return toy_psi(toy, q); };

    const auto j2 = jump_integral(toy_spec, 2.0, {});
    rep.items.push_back(scalar_vs_target("A5.J2",
                                         "toy jump integral at q=2 equals lambda (1 + beta^2)",
                                         j2.value, p.lambda * (1.0 + p.beta * p.beta), 1e-10));
    const auto k0 = kappa(toy_spec, psi, 0.0);
    rep.items.push_back(scalar_vs_target("A5.kappa0", "kappa(0) equals the total jump rate",
                                         k0.value, p.lambda, 1e-10));

    KappaScan scan = find_roots(toy_spec, psi, p.bracket_lo, p.bracket_hi);
    {
        CheckItem item;
        item.name = "A5.roots";
        item.identity = "cumulant root residuals at 1e-9, convexity on the scan grid";
        item.pass = scan.convex && !scan.roots.empty() && scan.max_root_residual <= 1e-9;
        for (std::size_t i = 0; i < scan.roots.size(); ++i)
            item.extras["root" + std::to_string(i)] = scan.roots[i];
        item.extras["max_residual"] = scan.max_root_residual;
        item.extras["convex"] = scan.convex ? 1.0 : 0.0;
        rep.items.push_back(std::move(item));
    }
    if (std::abs(p.drift - p.lambda * p.beta * p.beta) < 1e-14) {
        // drift = lambda beta^2 places a root exactly at 2
        const double w = scan.roots.empty() ? 0.0 : scan.roots.front();
        rep.items.push_back(scalar_vs_target("A5.designed-root",
                                             "first cumulant root sits at the designed exponent 2",
                                             w, 2.0, 1e-9));
    }

    const IsotropicStable stable{p.stable_alpha, p.stable_d};
    const LevySystemSpec stable_spec{stable};
    const JumpWindow window{-p.window_x, p.window_x, 0.0};
    {
        RngState rng(opts.seed, 5 * kStreamBase);
        double first = 0.0, worst = 0.0;
        for (int k = 0; k < 8; ++k) {
            auto theta = sample_uniform_sphere(rng, p.stable_d);
            const auto j = jump_integral(stable_spec, p.stable_q, theta, window);
            if (k == 0) first = j.value;
            else worst = std::max(worst, std::abs(j.value - first));
        }
        CheckItem item;
        item.name = "A5.isotropy";
        item.identity = "windowed stable jump integral is angle-independent";
        item.tolerance = 1e-6;
        item.pass = worst < 1e-6;
        item.extras["max_deviation"] = worst;
        item.extras["value"] = first;
        rep.items.push_back(std::move(item));
    }
    {
        RngState rng(opts.seed, 5 * kStreamBase + 1);
        std::vector<double> theta(static_cast<std::size_t>(p.stable_d), 0.0);
        theta[0] = 1.0;
        const auto quad = jump_integral(stable_spec, p.stable_q, theta, window);
        auto mc = jump_integral_mc_oracle(rng, stable_spec, p.stable_q, theta,
                                          static_cast<std::size_t>(p.oracle_n), window);
        CheckItem item = estimate_vs_target(
            "A5.oracle", "stable quadrature agrees with the truncated-window Monte-Carlo oracle",
            mc, quad.value);
        item.extras["quadrature_error"] = quad.error;
        rep.items.push_back(std::move(item));
    }
    rep.wall_seconds = watch.seconds();
    return rep;
}

RunReport run_gf(const VerifyOptions& opts, const GfParams& p) {
    Stopwatch watch;
    RunReport rep;
    rep.subcommand = "verify-gf";
    rep.seed = opts.seed;
    rep.threads = opts.threads;
    rep.config = {{"lambda", p.lambda}, {"beta", p.beta},     {"drift", p.drift},
                  {"omega", p.omega},   {"trees", p.trees},   {"size_floor", p.size_floor},
                  {"max_gen", p.max_gen}, {"sum_kappa_n", p.sum_kappa_n}, {"seed", opts.seed}};

    const ToyCP spec{2, p.lambda, p.beta, p.drift};
    const std::vector<double> x0{1.0, 0.0};
    const double horizon = 32.0;
    const int n_levels = std::min(p.max_gen, 4);

    const std::size_t N = static_cast<std::size_t>(p.trees);
    std::vector<std::vector<double>> gm_values(static_cast<std::size_t>(n_levels),
                                               std::vector<double>(N));
    std::vector<double> trunc_mass(N);
    run_chunked<int>(N, 16, opts.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            RngState rng(opts.seed, 6 * kStreamBase + i);
            const CellTree tree = build_cell_system(rng, spec, x0, p.max_gen, p.size_floor, horizon);
            for (int n = 0; n < n_levels; ++n) {
                const auto gm = genealogical_martingale(tree, n, p.omega);
                gm_values[static_cast<std::size_t>(n)][i] = gm.value;
                if (n == n_levels - 1) trunc_mass[i] = gm.truncated_mass;
            }
        }
        return 0;
    });

    const double target = std::pow(vec_norm(x0), p.omega);
    for (int n = 0; n < n_levels; ++n) {
        auto est = mean_ci(gm_values[static_cast<std::size_t>(n)], "genealogical_mean");
        est.seed = opts.seed;
        rep.items.push_back(estimate_vs_target(
            "A6.generation-" + std::to_string(n),
            "generation power-sum mean is constant (martingale in the generation index)", est,
            target));
    }
    {
        auto trunc = mean_ci(trunc_mass, "truncated_mass");
        CheckItem item;
        item.name = "A6.truncation";
        item.identity = "size-floor truncated mass stays below 1% of the estimate";
        item.pass = trunc.estimate < 0.01 * target;
        item.estimate = trunc;
        item.tolerance = 0.01 * target;
        rep.items.push_back(std::move(item));
    }

    // jump power-sum identity for a single cell
    auto psi = [&](double q) { return toy_psi(spec, q); };
    for (double q : {2.0, 3.0}) {
        if (!(psi(q) < 0.0)) continue;
        RngState rng(opts.seed, 11 * kStreamBase + static_cast<std::uint64_t>(q * 16));
        const auto check = sum_kappa_identity_check(rng, spec, psi, q,
                                                    static_cast<std::size_t>(p.sum_kappa_n));
        auto item = estimate_vs_target(
            "A11.q" + std::to_string(q).substr(0, 1),
            "single-cell jump power sum matches 1 - kappa(q)/psi(q)", check.mc, check.target);
        item.extras["tail_bound"] = check.tail_bound;
        rep.items.push_back(std::move(item));
    }
    rep.wall_seconds = watch.seconds();
    return rep;
}

RunReport run_spine_gf(const VerifyOptions& opts, const SpineGfParams& p) {
    Stopwatch watch;
    RunReport rep;
    rep.subcommand = "verify-spine-gf";
    rep.seed = opts.seed;
    rep.threads = opts.threads;
    rep.config = {{"lambda", p.lambda},   {"beta", p.beta},       {"drift", p.drift},
                  {"omega", p.omega},     {"n_arrivals", p.n_arrivals},
                  {"moment_paths", p.moment_paths}, {"moment_t", p.moment_t},
                  {"q_values", p.q_values}, {"temporal_t", p.temporal_t},
                  {"temporal_trees", p.temporal_trees}, {"temporal_spines", p.temporal_spines},
                  {"seed", opts.seed}};

    const ToyCP spec{2, p.lambda, p.beta, p.drift};
    const std::vector<double> x0{1.0, 0.0};
    auto psi = [&](double q) { return toy_psi(spec, q); };
    const double gen_rate = jump_integral(LevySystemSpec{spec}, p.omega, {}).value;

    // generation-change inter-arrivals are exponential at the tilted jump mass
    rep.items.push_back(stat_item_with_retry(
        "A7.interarrival-ks",
        "spine generation changes arrive at the tilted jump-measure mass", opts.seed,
        [&](std::uint64_t seed) {
            std::vector<double> gaps;
            gaps.reserve(static_cast<std::size_t>(p.n_arrivals));
            std::uint64_t stream = 7 * kStreamBase;
            while (gaps.size() < static_cast<std::size_t>(p.n_arrivals)) {
                RngState rng(seed, stream++);
                const SpinePath sp = sample_spine(rng, spec, x0, p.omega, 40.0);
                const auto times = sp.generation_times();
                double prev = 0.0;
                // keep only the first few uncensored gaps of each path
                for (std::size_t k = 0; k < times.size() && k < 4; ++k) {
                    gaps.push_back(times[k] - prev);
                    prev = times[k];
                }
            }
            gaps.resize(static_cast<std::size_t>(p.n_arrivals));
            return ks_test(gaps, [&](double x) { return exponential_cdf(x, gen_rate); },
                           "interarrival_ks");
        }));

    // exponential moments of the tagged log-radius against kappa(omega + q)
    {
        const std::size_t N = static_cast<std::size_t>(p.moment_paths);
        const std::size_t Q = p.q_values.size();
        std::vector<std::vector<double>> vals(Q, std::vector<double>(N));
        run_chunked<int>(N, 4096, opts.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                RngState rng(opts.seed, 7 * kStreamBase + (1ULL << 22) + i);
                const SpinePath sp = sample_spine(rng, spec, x0, p.omega, p.moment_t);
                const double xi = sp.xi_at(p.moment_t);
                for (std::size_t qi = 0; qi < Q; ++qi) vals[qi][i] = std::exp(p.q_values[qi] * xi);
            }
            return 0;
        });
        for (std::size_t qi = 0; qi < Q; ++qi) {
            const double q = p.q_values[qi];
            const double target = spine_exponent(LevySystemSpec{spec}, psi, p.omega, q);
            auto est = mean_ci(vals[qi], "spine_exp_moment");
            const double lhat = std::log(est.estimate) / p.moment_t;
            CheckItem item;
            item.name = "A7.exponent-q" + std::to_string(q).substr(0, 3);
            item.identity = "tagged-cell Laplace exponent equals kappa(omega + q)";
            item.target = target;
            item.tolerance = 0.02 * std::abs(target);
            item.pass = std::abs(lhat - target) <= *item.tolerance;
            item.extras["log_moment_rate"] = lhat;
            item.extras["moment_se"] = est.std_error;
            item.estimate = est;
            rep.items.push_back(std::move(item));
        }
    }

    // temporal identity: spine mean against the population power sum
    {
        const std::size_t NT = static_cast<std::size_t>(p.temporal_trees);
        std::vector<double> sum_w(NT), sum_w_norm(NT);
        run_chunked<int>(NT, 16, opts.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                RngState rng(opts.seed, 7 * kStreamBase + (2ULL << 22) + i);
                const CellTree tree =
                    build_cell_system(rng, spec, x0, 24, 1e-4, p.temporal_t);
                const Snapshot snap = snapshot(tree, p.temporal_t);
                double s2 = 0.0, s3 = 0.0;
                for (const auto& [vec, gen] : snap.cells) {
                    (void)gen;
                    const double nrm = vec_norm(vec);
                    const double mass = std::pow(nrm, p.omega);
                    s2 += mass;
                    s3 += mass * nrm;
                }
                sum_w[i] = s2;
                sum_w_norm[i] = s3;
            }
            return 0;
        });
        auto pop2 = mean_ci(sum_w, "population_mass");
        pop2.seed = opts.seed;
        rep.items.push_back(estimate_vs_target(
            "A10.temporal-f1", "population power-sum mean matches the spine normalization", pop2,
            std::pow(vec_norm(x0), p.omega)));

        const std::size_t NS = static_cast<std::size_t>(p.temporal_spines);
        std::vector<double> spine_vals(NS);
        run_chunked<int>(NS, 4096, opts.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                RngState rng(opts.seed, 7 * kStreamBase + (3ULL << 22) + i);
                const SpinePath sp = sample_spine(rng, spec, x0, p.omega, p.temporal_t);
                spine_vals[i] = std::exp(sp.xi_at(p.temporal_t));
            }
            return 0;
        });
        auto spine_est = mean_ci(spine_vals, "spine_norm_mean");
        auto pop3 = mean_ci(sum_w_norm, "population_mass_norm");
        rep.items.push_back(estimates_agree(
            "A10.temporal-fnorm",
            "population norm-weighted power sum matches the tagged-cell mean", pop3, spine_est));
    }
    rep.wall_seconds = watch.seconds();
    return rep;
}

RunReport run_bismut(const VerifyOptions& opts, const BismutParams& p) {
    Stopwatch watch;
    RunReport rep;
    rep.subcommand = "verify-bismut";
    rep.seed = opts.seed;
    rep.threads = opts.threads;
    rep.config = {{"d", p.d}, {"a_max", p.a_max}, {"N", p.N}, {"steps", p.steps}, {"seed", opts.seed}};

    rep.items.push_back(stat_item_with_retry(
        "A10.bismut-height", "duration-biased height marginal is uniform on the window",
        opts.seed, [&](std::uint64_t seed) {
            RngState rng(seed, 10 * kStreamBase);
            std::vector<double> heights(static_cast<std::size_t>(p.N));
            for (int i = 0; i < p.N; ++i) {
                const BismutSample b = bismut_sample(rng, p.d, p.a_max, p.steps);
                heights[static_cast<std::size_t>(i)] = b.height / p.a_max;
            }
            return chi_square_uniform(heights, 50, "bismut_height_chi2");
        }));
    rep.wall_seconds = watch.seconds();
    return rep;
}

RunReport run_many_to_one(const VerifyOptions& opts, const ManyToOneParams& p) {
    Stopwatch watch;
    RunReport rep;
    rep.subcommand = "verify-many-to-one";
    rep.seed = opts.seed;
    rep.threads = opts.threads;
    rep.config = {{"d", p.d}, {"x", p.x}, {"a", p.a}, {"N", p.N},
                  {"steps_lhs", p.steps_lhs}, {"steps_rhs", p.steps_rhs}, {"seed", opts.seed}};

    const double xnorm = vec_norm(p.x);
    const double x2 = xnorm * xnorm;
    const double xpow = std::pow(xnorm, static_cast<double>(p.d));
    const std::size_t N = static_cast<std::size_t>(p.N);
    if (p.d != 3)
        throw std::invalid_argument("run_many_to_one: the conditional estimator is built for d = 3");

    // excursion side, duration-stratified with the horizontal part
    // integrated analytically (see run_martingale)
    const DurationStrata st = make_duration_strata(p.d, N);
    const std::size_t K = st.prob.size();
    auto cdf_r = [&](double r) { return gamma_q(0.5 * p.d, 0.5 / r); };
    std::vector<std::vector<double>> vals_f1(K), vals_fexp(K);
    for (std::size_t b = 0; b < K; ++b) {
        vals_f1[b].resize(st.alloc[b]);
        vals_fexp[b].resize(st.alloc[b]);
    }
    const std::size_t n_total = st.offset.back() + st.alloc.back();
    run_chunked<int>(n_total, 64, opts.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t b = st.stratum_of(i);
            const std::size_t within = i - st.offset[b];
            RngState rng(opts.seed, 8 * kStreamBase + i);
            const double c_lo = b == 0 ? 0.0 : cdf_r(st.r_hi[b - 1]);
            const double r = sample_r_in_stratum(rng, p.d, c_lo, c_lo + st.prob[b]);
            const double D = r * x2;
            const PathGrid vertical = sample_bessel3_bridge(rng, D, p.steps_lhs);
            CrossingRefiner refiner{&rng};
            double s1 = 0.0, sexp = 0.0;
            for (const auto& [ts, te] : slice_intervals(vertical, p.a, refiner)) {
                const double len = te - ts;
                const double mu = len / D * xnorm;
                const double sig = std::sqrt(len * (D - len) / D);
                const double mass = gaussian2d_abs_moment3(mu, sig);
                s1 += mass;
                sexp += mass * std::exp(-ts);
            }
            vals_f1[b][within] = s1;
            vals_fexp[b][within] = sexp;
        }
        return 0;
    });

    auto lhs1 = stratified_estimate(st, vals_f1, "lhs_f1");
    lhs1.seed = opts.seed;
    rep.items.push_back(estimate_vs_target(
        "A8.f-one", "excursion side with unit functional recovers |x|^d", lhs1, xpow));

    auto lhs2 = stratified_estimate(st, vals_fexp, "lhs_fexp");
    lhs2.seed = opts.seed;
    {
        RngState rng(opts.seed, 9 * kStreamBase);
        auto rhs = many_to_one_rhs(
            rng, p.x, p.d, p.a,
            [](const HalfSpacePath& h1, const HalfSpacePath& h2) {
                (void)h2;
                return std::exp(-h1.horizon());
            },
            p.N, p.steps_rhs);
        rep.items.push_back(estimates_agree(
            "A8.f-duration",
            "excursion side matches the half-space side for a duration functional", lhs2, rhs));
    }

    // conditioned-law hitting-time moments under the power-sum weighting:
    // a plain (unstratified) ensemble with the conditional weights; the
    // self-normalized ratio is insensitive to the weight tail
    {
        std::vector<double> weights(N), t_hit(N), t_hit2(N);
        run_chunked<int>(N, 64, opts.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                RngState rng(opts.seed, 8 * kStreamBase + (8ULL << 20) + i);
                const double D = x2 / sample_gamma(rng, 0.5 * p.d, 0.5);
                const PathGrid vertical = sample_bessel3_bridge(rng, D, p.steps_lhs);
                CrossingRefiner refiner{&rng};
                double w = 0.0;
                for (const auto& [ts, te] : slice_intervals(vertical, p.a, refiner)) {
                    const double len = te - ts;
                    w += gaussian2d_abs_moment3(len / D * xnorm,
                                                std::sqrt(len * (D - len) / D));
                }
                weights[i] = w;
                const auto hit = first_crossing(vertical, p.a, refiner);
                t_hit[i] = hit ? *hit : 0.0;
                t_hit2[i] = t_hit[i] * t_hit[i];
            }
            return 0;
        });
        auto wm1 = weighted_mean_ci(t_hit, weights, "weighted_T1");
        auto wm2 = weighted_mean_ci(t_hit2, weights, "weighted_T2");

        const std::size_t M = N;
        std::vector<double> ref1(M), ref2(M);
        run_chunked<int>(M, 256, opts.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                RngState rng(opts.seed, 9 * kStreamBase + (1ULL << 22) + i);
                const double t = bessel3_first_hit(rng, p.a, p.steps_rhs);
                ref1[i] = t;
                ref2[i] = t * t;
            }
            return 0;
        });
        auto r1 = mean_ci(ref1, "bessel_hit_T1");
        auto r2 = mean_ci(ref2, "bessel_hit_T2");
        rep.items.push_back(estimates_agree(
            "A9.hit-mean", "weighted first-passage mean matches the transient vertical part",
            wm1, r1));
        rep.items.push_back(estimates_agree(
            "A9.hit-second-moment",
            "weighted first-passage second moment matches the transient vertical part", wm2, r2));
    }
    rep.wall_seconds = watch.seconds();
    return rep;
}

} // namespace gfx

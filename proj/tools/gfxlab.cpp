// Command-line front end: every subcommand runs one slice of the
// verification suite and writes a machine-readable JSON report.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gfxlab/cumulant.hpp"
#include "gfxlab/excursion.hpp"
#include "gfxlab/gfengine.hpp"
#include "gfxlab/halfspace.hpp"
#include "gfxlab/report.hpp"
#include "gfxlab/verify.hpp"

namespace {

struct GlobalArgs {
    std::uint64_t seed = 20240;
    int threads = 1;
    std::string out_dir = "reports";
};

gfx::VerifyOptions make_options(const GlobalArgs& g) {
    gfx::VerifyOptions opts;
    opts.seed = g.seed;
    opts.threads = g.threads;
    opts.out_dir = g.out_dir;
    if (const char* env = std::getenv("GFXLAB_OUT")) opts.out_dir = env;
    if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);
    return opts;
}

int emit(gfx::RunReport rep, const gfx::VerifyOptions& opts) {
    gfx::finalize_report(rep, std::cout, opts.report_path(rep.subcommand));
    std::cout << (rep.pass ? "OK" : "FAILED") << "  " << rep.subcommand << "  ("
              << rep.wall_seconds << " s)\n";
    return rep.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gfx-lab: growth-fragmentation and half-space excursion laboratory"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--seed", g.seed, "master seed (all streams derive from it)");
    app.add_option("--threads", g.threads, "replicate-level worker threads");
    app.add_option("--out", g.out_dir, "report output directory");

    // verify-martingale
    gfx::MartingaleParams mart;
    auto* cmd_mart = app.add_subcommand("verify-martingale",
                                        "sliced power-sum mean against |x|^d");
    cmd_mart->add_option("--d", mart.d);
    cmd_mart->add_option("--x", mart.x, "endpoint in R^{d-1}");
    cmd_mart->add_option("--omega", mart.omega);
    cmd_mart->add_option("--a", mart.levels, "slicing levels");
    cmd_mart->add_option("--n", mart.N);
    cmd_mart->add_option("--steps", mart.steps);
    cmd_mart->add_option("--eps-floor", mart.eps_floor);

    gfx::SpineMarginalParams spine;
    auto* cmd_spine = app.add_subcommand("verify-spine", "Cauchy spine-size marginal");
    cmd_spine->add_option("--d", spine.d);
    cmd_spine->add_option("--a", spine.a);
    cmd_spine->add_option("--n", spine.N);

    gfx::SpineStableParams spine_stable;
    auto* cmd_sps = app.add_subcommand("verify-spine-stable", "stable spine-size marginal");
    cmd_sps->add_option("--d", spine_stable.d);
    cmd_sps->add_option("--alpha", spine_stable.alpha);
    cmd_sps->add_option("--a", spine_stable.a);
    cmd_sps->add_option("--n", spine_stable.N);

    gfx::KappaParams kap;
    std::vector<double> bracket;
    auto* cmd_kappa = app.add_subcommand("kappa", "cumulant table, roots, jump-integral checks");
    cmd_kappa->add_option("--lambda", kap.lambda);
    cmd_kappa->add_option("--beta", kap.beta);
    cmd_kappa->add_option("--drift", kap.drift);
    cmd_kappa->add_option("--bracket", bracket, "root bracket (two values)")->expected(2);
    cmd_kappa->add_option("--alpha", kap.stable_alpha);
    cmd_kappa->add_option("--stable-d", kap.stable_d);
    cmd_kappa->add_option("--q", kap.stable_q);
    cmd_kappa->add_option("--window-x", kap.window_x);
    std::string kappa_csv;
    cmd_kappa->add_option("--csv", kappa_csv, "write the kappa table to this file");

    gfx::GfParams gf;
    auto* cmd_gf = app.add_subcommand("verify-gf", "genealogical martingale and jump power sums");
    cmd_gf->add_option("--lambda", gf.lambda);
    cmd_gf->add_option("--beta", gf.beta);
    cmd_gf->add_option("--drift", gf.drift);
    cmd_gf->add_option("--omega", gf.omega);
    cmd_gf->add_option("--trees", gf.trees);
    cmd_gf->add_option("--size-floor", gf.size_floor);
    cmd_gf->add_option("--max-gen", gf.max_gen);

    gfx::SpineGfParams sgf;
    auto* cmd_sgf = app.add_subcommand("verify-spine-gf",
                                       "tagged-cell exponent and temporal identity");
    cmd_sgf->add_option("--arrivals", sgf.n_arrivals);
    cmd_sgf->add_option("--paths", sgf.moment_paths);
    cmd_sgf->add_option("--t", sgf.moment_t);

    gfx::BismutParams bis;
    auto* cmd_bis = app.add_subcommand("verify-bismut", "duration-biased height marginal");
    cmd_bis->add_option("--d", bis.d);
    cmd_bis->add_option("--amax", bis.a_max);
    cmd_bis->add_option("--n", bis.N);

    gfx::ManyToOneParams mto;
    auto* cmd_mto = app.add_subcommand("verify-many-to-one",
                                       "excursion side against half-space side");
    cmd_mto->add_option("--d", mto.d);
    cmd_mto->add_option("--x", mto.x);
    cmd_mto->add_option("--a", mto.a);
    cmd_mto->add_option("--n", mto.N);

    auto* cmd_all = app.add_subcommand("verify-all", "run the whole suite");

    CLI11_PARSE(app, argc, argv);
    const gfx::VerifyOptions opts = make_options(g);

    try {
        if (cmd_mart->parsed()) {
            if (mart.N < 100) throw CLI::ValidationError("--n", "needs at least 100 replicates");
            return emit(gfx::run_martingale(opts, mart), opts);
        }
        if (cmd_spine->parsed()) return emit(gfx::run_spine(opts, spine), opts);
        if (cmd_sps->parsed()) return emit(gfx::run_spine_stable(opts, spine_stable), opts);
        if (cmd_kappa->parsed()) {
            if (bracket.size() == 2) {
                kap.bracket_lo = bracket[0];
                kap.bracket_hi = bracket[1];
            }
            gfx::RunReport rep = gfx::run_kappa(opts, kap);
            if (!kappa_csv.empty()) {
                const gfx::ToyCP toy{2, kap.lambda, kap.beta, kap.drift};
                auto psi = [&](double q) { return gfx::toy_psi(toy, q); };
                const auto scan = gfx::find_roots(gfx::LevySystemSpec{toy}, psi, kap.bracket_lo,
                                                  kap.bracket_hi);
                std::ofstream f(kappa_csv);
                gfx::write_kappa_csv(f, scan);
            }
            return emit(std::move(rep), opts);
        }
        if (cmd_gf->parsed()) return emit(gfx::run_gf(opts, gf), opts);
        if (cmd_sgf->parsed()) return emit(gfx::run_spine_gf(opts, sgf), opts);
        if (cmd_bis->parsed()) return emit(gfx::run_bismut(opts, bis), opts);
        if (cmd_mto->parsed()) return emit(gfx::run_many_to_one(opts, mto), opts);
        if (cmd_all->parsed()) {
            int rc = 0;
            rc |= emit(gfx::run_kappa(opts, {}), opts);
            rc |= emit(gfx::run_spine(opts, {}), opts);
            rc |= emit(gfx::run_spine_stable(opts, {}), opts);
            rc |= emit(gfx::run_bismut(opts, {}), opts);
            rc |= emit(gfx::run_gf(opts, {}), opts);
            rc |= emit(gfx::run_spine_gf(opts, {}), opts);
            rc |= emit(gfx::run_many_to_one(opts, {}), opts);
            rc |= emit(gfx::run_martingale(opts, {}), opts);
            std::cout << (rc == 0 ? "ALL PASS" : "SUITE FAILED") << "\n";
            return rc;
        }
    } catch (const std::exception& ex) {
        nlohmann::json err{{"error", ex.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 2;
}

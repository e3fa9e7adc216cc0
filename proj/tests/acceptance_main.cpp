// Acceptance suite: one test case per criterion, one console line per item.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <thread>

#include "gfxlab/verify.hpp"

namespace {

gfx::VerifyOptions acceptance_options() {
    gfx::VerifyOptions opts;
    opts.seed = 20240;
    opts.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return opts;
}

void check_report(const gfx::RunReport& rep) {
    for (const auto& item : rep.items) {
        std::printf("%-6s %-24s %s\n", item.pass ? "PASS" : "FAIL", item.name.c_str(),
                    item.identity.c_str());
        CHECK_MESSAGE(item.pass, item.name, ": ", item.identity);
    }
    std::printf("       (%s finished in %.1f s)\n", rep.subcommand.c_str(), rep.wall_seconds);
}

} // namespace

TEST_CASE("A1+A2 martingale of sliced power sums, duration normalization") {
    check_report(gfx::run_martingale(acceptance_options()));
}

TEST_CASE("A3 Cauchy spine marginal") { check_report(gfx::run_spine(acceptance_options())); }

TEST_CASE("A4 stable spine marginal") {
    check_report(gfx::run_spine_stable(acceptance_options()));
}

TEST_CASE("A5 cumulant values, roots, isotropy, oracle") {
    gfx::RunReport rep = gfx::run_kappa(acceptance_options());
    check_report(rep);
    // the default toy bracket must expose both roots: the designed one at 2
    // and the upper one where the jump integral overtakes the drift
    double root0 = 0.0, root1 = 0.0;
    for (const auto& item : rep.items) {
        if (item.name == "A5.roots") {
            root0 = item.extras.count("root0") ? item.extras.at("root0") : 0.0;
            root1 = item.extras.count("root1") ? item.extras.at("root1") : 0.0;
        }
    }
    CHECK(std::abs(root0 - 2.0) <= 1e-9);
    CHECK(std::abs(root1 - 3.4655117500135) <= 1e-7);
}

TEST_CASE("A6+A11 genealogical martingale, jump power-sum identity") {
    check_report(gfx::run_gf(acceptance_options()));
}

TEST_CASE("A7+A10b tagged-cell exponent, temporal identity") {
    check_report(gfx::run_spine_gf(acceptance_options()));
}

TEST_CASE("A8+A9 many-to-one both sides, weighted hitting moments") {
    check_report(gfx::run_many_to_one(acceptance_options()));
}

TEST_CASE("A10a duration-biased height marginal") {
    check_report(gfx::run_bismut(acceptance_options()));
}

int main(int argc, char** argv) {
    doctest::Context ctx(argc, argv);
    return ctx.run();
}

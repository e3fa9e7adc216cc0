#pragma once

#include <cstdint>
#include <string>

#include "gfxlab/report.hpp"

namespace gfx {

struct VerifyOptions {
    std::uint64_t seed = 20240;
    int threads = 1;
    std::string out_dir;  // empty: no report files

    std::string report_path(const std::string& name) const {
        return out_dir.empty() ? std::string{} : out_dir + "/" + name + ".json";
    }
};

struct MartingaleParams {
    int d = 3;
    std::vector<double> x{1.0, 0.0};
    double omega = 3.0;
    std::vector<double> levels{0.3, 0.6};
    int N = 20000;
    int steps = 16384;
    double eps_floor = 1e-4;
};

struct SpineMarginalParams {
    int d = 3;
    double a = 1.0;
    int N = 100000;
};

struct SpineStableParams {
    int d = 3;
    double alpha = 1.2;
    double a = 1.0;
    int N = 100000;
    std::vector<double> u_values{0.5, 1.0, 2.0};
};

struct KappaParams {
    double lambda = 1.0;
    double beta = 0.5;
    double drift = 0.25;
    double bracket_lo = 0.5;
    double bracket_hi = 10.0;
    double stable_alpha = 1.5;
    int stable_d = 2;
    double stable_q = 2.0;
    double window_x = 6.0;
    int oracle_n = 200000;
};

struct GfParams {
    double lambda = 1.0;
    double beta = 0.5;
    double drift = 0.25;  // lambda beta^2 makes omega = 2 a root
    double omega = 2.0;
    int trees = 5000;
    double size_floor = 1e-3;
    int max_gen = 4;
    int sum_kappa_n = 50000;
};

struct SpineGfParams {
    double lambda = 1.0;
    double beta = 0.5;
    double drift = 0.25;
    double omega = 2.0;
    int n_arrivals = 50000;
    int moment_paths = 2600000;
    double moment_t = 1.0;
    std::vector<double> q_values{0.5, 1.0};
    double temporal_t = 0.75;
    int temporal_trees = 4000;
    int temporal_spines = 200000;
};

struct BismutParams {
    int d = 3;
    double a_max = 1.0;
    int N = 100000;
    int steps = 32;
};

struct ManyToOneParams {
    int d = 3;
    std::vector<double> x{1.0, 0.0};
    double a = 0.3;
    int N = 20000;
    int steps_lhs = 8192;
    int steps_rhs = 2048;
};

RunReport run_martingale(const VerifyOptions& opts, const MartingaleParams& p = {});
RunReport run_spine(const VerifyOptions& opts, const SpineMarginalParams& p = {});
RunReport run_spine_stable(const VerifyOptions& opts, const SpineStableParams& p = {});
RunReport run_kappa(const VerifyOptions& opts, const KappaParams& p = {});
RunReport run_gf(const VerifyOptions& opts, const GfParams& p = {});
RunReport run_spine_gf(const VerifyOptions& opts, const SpineGfParams& p = {});
RunReport run_bismut(const VerifyOptions& opts, const BismutParams& p = {});
RunReport run_many_to_one(const VerifyOptions& opts, const ManyToOneParams& p = {});

} // namespace gfx

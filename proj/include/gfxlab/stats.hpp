#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gfx {

/// Monte-Carlo estimate with 99.7% (3 sigma) confidence interval and seed
/// provenance.
struct EstimateReport {
    std::string name;
    double estimate = 0.0;
    std::size_t n = 0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::map<std::string, double> diagnostics;  // truncation masses etc.
};

struct StatTestResult {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    double p_proxy = 0.0;
    bool pass = false;
    std::size_t n = 0;
};

/// Two estimates agree when |e1 - e2| <= 3 sqrt(se1^2 + se2^2).
bool agree_3sigma(const EstimateReport& a, const EstimateReport& b);

EstimateReport mean_ci(std::span<const double> samples, const std::string& name = "mean");

/// Self-normalized ratio estimator sum(w v)/sum(w) with delta-method SE.
EstimateReport weighted_mean_ci(std::span<const double> values, std::span<const double> weights,
                                const std::string& name = "weighted_mean");

/// One-sample Kolmogorov-Smirnov against a cdf; threshold 1.949/sqrt(n)
/// (asymptotic p = 0.001).  Requires n >= 1000 and finite inputs.
StatTestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                       const std::string& name = "ks");

/// Two-sample KS at the same significance.
StatTestResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                             const std::string& name = "ks2");

/// Chi-square uniformity test for samples in [0,1]; threshold at p = 0.001.
StatTestResult chi_square_uniform(std::span<const double> samples, int bins,
                                  const std::string& name = "chi2_uniform");

/// Max over the u-grid of the standardized distance between the empirical
/// characteristic function and a target; passes when every point is within
/// 3 standard errors (statistic is the worst standardized deviation).
StatTestResult cf_distance(std::span<const double> samples, int dim,
                           const std::function<std::complex<double>(std::span<const double>)>& target_cf,
                           const std::vector<std::vector<double>>& u_grid,
                           const std::string& name = "cf_distance");

double pearson_correlation(std::span<const double> a, std::span<const double> b);

} // namespace gfx

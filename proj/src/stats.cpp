#include "gfxlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gfxlab/special.hpp"

namespace gfx {

namespace {
constexpr double kKs001 = 1.949;  // asymptotic KS critical value at p = 0.001

void require_finite(std::span<const double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) throw std::invalid_argument("samples contain non-finite values");
}
} // namespace

bool agree_3sigma(const EstimateReport& a, const EstimateReport& b) {
    const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    return std::abs(a.estimate - b.estimate) <= 3.0 * se;
}

EstimateReport mean_ci(std::span<const double> samples, const std::string& name) {
    if (samples.empty()) throw std::invalid_argument("mean_ci: empty sample");
    require_finite(samples);
    double m = 0.0;
    for (double x : samples) m += x;
    m /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double x : samples) ss += (x - m) * (x - m);
    const double var = samples.size() > 1 ? ss / static_cast<double>(samples.size() - 1) : 0.0;
    EstimateReport r;
    r.name = name;
    r.estimate = m;
    r.n = samples.size();
    r.std_error = std::sqrt(var / static_cast<double>(samples.size()));
    r.ci_low = m - 3.0 * r.std_error;
    r.ci_high = m + 3.0 * r.std_error;
    return r;
}

EstimateReport weighted_mean_ci(std::span<const double> values, std::span<const double> weights,
                                const std::string& name) {
    if (values.size() != weights.size() || values.empty())
        throw std::invalid_argument("weighted_mean_ci: size mismatch");
    require_finite(values);
    require_finite(weights);
    double sw = 0.0, swv = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("weighted_mean_ci: negative weight");
        sw += weights[i];
        swv += weights[i] * values[i];
    }
    if (sw <= 0.0) throw std::invalid_argument("weighted_mean_ci: zero total weight");
    const double mu = swv / sw;
    double s2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = weights[i] * (values[i] - mu);
        s2 += d * d;
    }
    EstimateReport r;
    r.name = name;
    r.estimate = mu;
    r.n = values.size();
    r.std_error = std::sqrt(s2) / sw;
    r.ci_low = mu - 3.0 * r.std_error;
    r.ci_high = mu + 3.0 * r.std_error;
    return r;
}

StatTestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                       const std::string& name) {
    if (samples.size() < 1000) throw std::invalid_argument("ks_test: need n >= 1000");
    require_finite(samples);
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    StatTestResult r;
    r.name = name;
    r.statistic = d;
    r.threshold = kKs001 / std::sqrt(n);
    r.p_proxy = kolmogorov_q(std::sqrt(n) * d);
    r.pass = d < r.threshold;
    r.n = samples.size();
    return r;
}

StatTestResult ks_two_sample(std::vector<double> a, std::vector<double> b, const std::string& name) {
    if (a.size() < 100 || b.size() < 100) throw std::invalid_argument("ks_two_sample: samples too small");
    require_finite(a);
    require_finite(b);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    StatTestResult r;
    r.name = name;
    r.statistic = d;
    r.threshold = kKs001 / std::sqrt(ne);
    r.p_proxy = kolmogorov_q(std::sqrt(ne) * d);
    r.pass = d < r.threshold;
    r.n = a.size() + b.size();
    return r;
}

StatTestResult chi_square_uniform(std::span<const double> samples, int bins, const std::string& name) {
    if (bins < 2) throw std::invalid_argument("chi_square_uniform: bins >= 2");
    if (samples.size() < static_cast<std::size_t>(10 * bins))
        throw std::invalid_argument("chi_square_uniform: too few samples for bin count");
    require_finite(samples);
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double x : samples) {
        if (x < 0.0 || x > 1.0) throw std::invalid_argument("chi_square_uniform: sample outside [0,1]");
        int k = static_cast<int>(x * bins);
        if (k == bins) k = bins - 1;
        counts[static_cast<std::size_t>(k)] += 1.0;
    }
    const double expected = static_cast<double>(samples.size()) / bins;
    double stat = 0.0;
    for (double c : counts) stat += (c - expected) * (c - expected) / expected;
    StatTestResult r;
    r.name = name;
    r.statistic = stat;
    r.threshold = chi2_quantile(0.999, bins - 1);
    r.p_proxy = gamma_q(0.5 * (bins - 1), 0.5 * stat);
    r.pass = stat < r.threshold;
    r.n = samples.size();
    return r;
}

StatTestResult cf_distance(std::span<const double> samples, int dim,
                           const std::function<std::complex<double>(std::span<const double>)>& target_cf,
                           const std::vector<std::vector<double>>& u_grid, const std::string& name) {
    if (dim < 1 || samples.size() % static_cast<std::size_t>(dim) != 0)
        throw std::invalid_argument("cf_distance: sample layout mismatch");
    const std::size_t n = samples.size() / static_cast<std::size_t>(dim);
    if (n < 10000) throw std::invalid_argument("cf_distance: need n >= 10^4");
    if (u_grid.empty()) throw std::invalid_argument("cf_distance: empty u grid");
    require_finite(samples);

    double worst = 0.0;
    for (const auto& u : u_grid) {
        if (u.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("cf_distance: u dimension mismatch");
        double sc = 0.0, ss = 0.0, sc2 = 0.0, ss2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0.0;
            for (int k = 0; k < dim; ++k) dot += u[static_cast<std::size_t>(k)] * samples[i * dim + k];
            const double c = std::cos(dot), s = std::sin(dot);
            sc += c; ss += s; sc2 += c * c; ss2 += s * s;
        }
        const double nn = static_cast<double>(n);
        const double mc = sc / nn, ms = ss / nn;
        const double se_c = std::sqrt(std::max(sc2 / nn - mc * mc, 1e-300) / nn);
        const double se_s = std::sqrt(std::max(ss2 / nn - ms * ms, 1e-300) / nn);
        const std::complex<double> t = target_cf(std::span<const double>(u.data(), u.size()));
        worst = std::max(worst, std::abs(mc - t.real()) / se_c);
        worst = std::max(worst, std::abs(ms - t.imag()) / se_s);
    }
    StatTestResult r;
    r.name = name;
    r.statistic = worst;
    r.threshold = 3.0;
    r.p_proxy = 2.0 * (1.0 - normal_cdf(worst));
    r.pass = worst < 3.0;
    r.n = n;
    return r;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("pearson: size mismatch");
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) { ma += a[i]; mb += b[i]; }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(a.size());
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace gfx

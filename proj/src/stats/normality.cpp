#include "refwhy/stats/normality.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace refwhy::stats {

namespace {

// D'Agostino and Stephens, case 3 (both parameters estimated).
double ad_p_value(double a) {
    double p;
    if (a >= 0.6)
        p = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
    else if (a >= 0.34)
        p = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
    else if (a >= 0.2)
        p = 1 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
    else
        p = 1 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

TestResult anderson_darling_normal(std::vector<double> x) {
    const std::size_t n = x.size();
    if (n < 8) throw TooFewSamples("Anderson-Darling needs at least 8 samples, got " + std::to_string(n));
    std::sort(x.begin(), x.end());
    const double nd = static_cast<double>(n);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / nd;
    double ss = 0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (nd - 1));
    if (!(sd > 0) || x.front() == x.back()) throw ZeroVariance("all samples are equal");

    boost::math::normal_distribution<double> std_normal;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        // log Phi(z) and log(1 - Phi(z)) through the complement keep precision in the tails.
        const double zi = (x[i] - mean) / sd;
        const double zj = (x[n - 1 - i] - mean) / sd;
        const double lo = std::log(std::max(boost::math::cdf(std_normal, zi), 1e-300));
        const double hi =
            std::log(std::max(boost::math::cdf(boost::math::complement(std_normal, zj)), 1e-300));
        s += (2.0 * static_cast<double>(i) + 1) * (lo + hi);
    }
    const double a2 = -nd - s / nd;
    const double adj = a2 * (1 + 0.75 / nd + 2.25 / (nd * nd));

    TestResult r;
    r.statistic = adj;
    r.p_value = ad_p_value(adj);
    r.extra["a2"] = a2;
    r.extra["reject_at_005"] = r.p_value < 0.05 ? 1 : 0;
    r.extra["mean"] = mean;
    r.extra["sd"] = sd;
    return r;
}

}  // namespace refwhy::stats

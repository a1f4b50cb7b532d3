#include "refwhy/stats/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace refwhy::stats {

namespace {

void check_pair(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw LengthMismatch(std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " values");
    if (x.size() < 3) throw TooFewSamples("rank correlation needs at least 3 pairs");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::isnan(x[i]) || std::isnan(y[i])) throw DomainError("NaN in rank correlation input");
}

// Sum over tie groups of f(t) for a sorted vector.
template <typename F>
double tie_sum(const std::vector<double>& sorted, F f) {
    double s = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        s += f(static_cast<double>(j - i));
        i = j;
    }
    return s;
}

// Counts inversions of v while merge-sorting it in place.
std::uint64_t count_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = count_swaps(v, buf, lo, mid) + count_swaps(v, buf, mid, hi);
    std::size_t i = lo, j = mid, o = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += mid - i;
            buf[o++] = v[j++];
        } else {
            buf[o++] = v[i++];
        }
    }
    while (i < mid) buf[o++] = v[i++];
    while (j < hi) buf[o++] = v[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

}  // namespace

std::vector<double> mid_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

TestResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair(x, y);
    const auto rx = mid_ranks(x), ry = mid_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mean = (n + 1) / 2;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0 || syy == 0) throw ZeroVariance("a rank vector is constant");
    const double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    TestResult r;
    r.statistic = rho;
    r.df = static_cast<int>(n) - 2;
    if (std::fabs(rho) >= 1.0) {
        r.p_value = 0.0;
        r.extra["t"] = rho > 0 ? INFINITY : -INFINITY;
    } else {
        const double t = rho * std::sqrt((n - 2) / (1 - rho * rho));
        r.p_value = student_t_two_sided(t, n - 2);
        r.extra["t"] = t;
    }
    return r;
}

TestResult kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair(x, y);
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
    });
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }

    const double nd = static_cast<double>(n);
    const double n0 = nd * (nd - 1) / 2;
    // Pairs tied in x, and tied in both.
    double n1 = 0, n3 = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && xs[j] == xs[i]) ++j;
        n1 += static_cast<double>(j - i) * static_cast<double>(j - i - 1) / 2;
        for (std::size_t a = i; a < j;) {
            std::size_t b = a;
            while (b < j && ys[b] == ys[a]) ++b;
            n3 += static_cast<double>(b - a) * static_cast<double>(b - a - 1) / 2;
            a = b;
        }
        i = j;
    }
    std::vector<double> buf(n);
    const double swaps = static_cast<double>(count_swaps(ys, buf, 0, n));
    // ys is sorted now.
    const double n2 = tie_sum(ys, [](double t) { return t * (t - 1) / 2; });
    if (n1 == n0 || n2 == n0) throw ZeroVariance("a vector is constant");

    const double s = n0 - n1 - n2 + n3 - 2 * swaps;
    const double tau = std::clamp(s / std::sqrt((n0 - n1) * (n0 - n2)), -1.0, 1.0);

    std::vector<double> xsorted = xs;  // already sorted by x
    auto ties = [](const std::vector<double>& v, auto f) { return tie_sum(v, f); };
    const double vt = ties(xsorted, [](double t) { return t * (t - 1) * (2 * t + 5); });
    const double vu = ties(ys, [](double t) { return t * (t - 1) * (2 * t + 5); });
    const double t1 = ties(xsorted, [](double t) { return t * (t - 1); });
    const double u1 = ties(ys, [](double t) { return t * (t - 1); });
    const double t2 = ties(xsorted, [](double t) { return t * (t - 1) * (t - 2); });
    const double u2 = ties(ys, [](double t) { return t * (t - 1) * (t - 2); });
    const double var_s = (nd * (nd - 1) * (2 * nd + 5) - vt - vu) / 18 + t1 * u1 / (2 * nd * (nd - 1)) +
                         t2 * u2 / (9 * nd * (nd - 1) * (nd - 2));

    TestResult r;
    r.statistic = tau;
    const double z = var_s > 0 ? s / std::sqrt(var_s) : 0.0;
    r.p_value = std::min(1.0, 2 * normal_sf(std::fabs(z)));
    r.extra["s"] = s;
    r.extra["var_s"] = var_s;
    r.extra["z"] = z;
    return r;
}

}  // namespace refwhy::stats

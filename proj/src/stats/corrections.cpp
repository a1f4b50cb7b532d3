#include "refwhy/stats/corrections.hpp"

#include "refwhy/error.hpp"

#include <algorithm>
#include <numeric>

namespace refwhy::stats {

namespace {

void check(const std::vector<double>& p, double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw DomainError("alpha must lie in (0, 1)");
    if (p.empty()) throw DomainError("no p-values");
    for (double v : p)
        if (!(v >= 0 && v <= 1)) throw DomainError("p-value outside [0, 1]");
}

}  // namespace

BonferroniResult bonferroni(const std::vector<double>& p, double alpha) {
    check(p, alpha);
    BonferroniResult r;
    r.threshold = alpha / static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] < r.threshold) r.rejections.push_back(i);
    return r;
}

BHResult benjamini_hochberg(const std::vector<double>& p, double alpha) {
    check(p, alpha);
    const std::size_t m = p.size();
    const double md = static_cast<double>(m);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });

    std::size_t k = 0;  // number of rejections
    for (std::size_t r = m; r >= 1; --r)
        if (p[order[r - 1]] <= static_cast<double>(r) * alpha / md) {
            k = r;
            break;
        }
    BHResult out;
    for (std::size_t r = 0; r < k; ++r) out.rejections.push_back(order[r]);
    std::sort(out.rejections.begin(), out.rejections.end());

    out.p_adjusted.assign(m, 1.0);
    double running = 1.0;
    for (std::size_t r = m; r >= 1; --r) {
        const std::size_t i = order[r - 1];
        running = std::min(running, md * p[i] / static_cast<double>(r));
        out.p_adjusted[i] = std::min(running, 1.0);
    }
    return out;
}

}  // namespace refwhy::stats

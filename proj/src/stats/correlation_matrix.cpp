#include "refwhy/stats/correlation_matrix.hpp"

#include "refwhy/stats/corrections.hpp"
#include "refwhy/stats/rank.hpp"
#include "refwhy/util/csv.hpp"
#include "refwhy/util/text.hpp"

#include <cmath>
#include <limits>

namespace refwhy::stats {

CorrelationMatrix build_correlation_matrix(const std::vector<std::string>& labels,
                                           const std::vector<std::string>& rmcs,
                                           const std::vector<NamedColumn>& metrics, double alpha) {
    if (rmcs.empty() || metrics.empty()) throw DomainError("correlation matrix needs RMCs and metrics");
    for (const auto& col : metrics)
        if (col.values.size() != labels.size())
            throw LengthMismatch("metric " + col.name + " has " + std::to_string(col.values.size()) +
                                 " values for " + std::to_string(labels.size()) + " rows");

    CorrelationMatrix m;
    m.rmcs = rmcs;
    m.alpha = alpha;
    for (const auto& col : metrics) m.metrics.push_back(col.name);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (const auto& rmc : rmcs) {
        std::vector<double> indicator(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) indicator[i] = labels[i] == rmc ? 1.0 : 0.0;
        for (const auto& col : metrics) {
            CorrelationCell cell;
            cell.rmc = rmc;
            cell.metric = col.name;
            std::vector<double> x, y;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (!std::isnan(col.values[i])) {
                    x.push_back(indicator[i]);
                    y.push_back(col.values[i]);
                }
            cell.n = x.size();
            try {
                auto s = spearman_rho(x, y);
                auto k = kendall_tau(x, y);
                cell.rho = s.statistic;
                cell.rho_p = s.p_value;
                cell.tau = k.statistic;
                cell.tau_p = k.p_value;
            } catch (const ZeroVariance&) {
                cell.degenerate = true;
                cell.rho = cell.tau = nan;
                cell.rho_p = cell.tau_p = 1.0;
            } catch (const TooFewSamples&) {
                cell.degenerate = true;
                cell.rho = cell.tau = nan;
                cell.rho_p = cell.tau_p = 1.0;
            }
            m.cells.push_back(cell);
        }
    }

    std::vector<double> prho, ptau;
    for (const auto& c : m.cells) {
        prho.push_back(c.rho_p);
        ptau.push_back(c.tau_p);
    }
    auto bon_r = bonferroni(prho, alpha), bon_t = bonferroni(ptau, alpha);
    auto bh_r = benjamini_hochberg(prho, alpha), bh_t = benjamini_hochberg(ptau, alpha);
    m.bonferroni_threshold = bon_r.threshold;
    for (auto i : bon_r.rejections) m.cells[i].rho_bonf_reject = true;
    for (auto i : bon_t.rejections) m.cells[i].tau_bonf_reject = true;
    for (auto i : bh_r.rejections) m.cells[i].rho_bh_reject = true;
    for (auto i : bh_t.rejections) m.cells[i].tau_bh_reject = true;
    for (std::size_t i = 0; i < m.cells.size(); ++i) {
        m.cells[i].rho_p_bh = bh_r.p_adjusted[i];
        m.cells[i].tau_p_bh = bh_t.p_adjusted[i];
    }
    return m;
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m) {
    auto num = [](double v) { return std::isnan(v) ? std::string("NA") : util::format_double(v); };
    util::write_csv_row(out, {"rmc", "metric", "rho", "tau", "p_raw", "p_bonf_reject", "p_bh", "tau_p_raw",
                              "tau_p_bonf_reject", "tau_p_bh"});
    for (const auto& c : m.cells)
        util::write_csv_row(out, {c.rmc, c.metric, num(c.rho), num(c.tau), num(c.rho_p),
                                  c.rho_bonf_reject ? "1" : "0", num(c.rho_p_bh), num(c.tau_p),
                                  c.tau_bonf_reject ? "1" : "0", num(c.tau_p_bh)});
}

}  // namespace refwhy::stats

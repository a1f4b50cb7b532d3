#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace refwhy::stats {

struct NamedColumn {
    std::string name;
    std::vector<double> values;
};

struct CorrelationCell {
    std::string rmc;
    std::string metric;
    // NaN when undefined (constant indicator or metric); p_raw is then 1.
    double rho = 0, rho_p = 1, rho_p_bh = 1;
    double tau = 0, tau_p = 1, tau_p_bh = 1;
    bool rho_bonf_reject = false, rho_bh_reject = false;
    bool tau_bonf_reject = false, tau_bh_reject = false;
    bool degenerate = false;
    std::size_t n = 0;  // rows with a value for the metric
};

struct CorrelationMatrix {
    std::vector<std::string> rmcs;     // rows
    std::vector<std::string> metrics;  // columns
    std::vector<CorrelationCell> cells;  // row-major
    double alpha = 0.05;
    double bonferroni_threshold = 0;

    std::size_t m() const { return cells.size(); }
    const CorrelationCell& at(std::size_t r, std::size_t c) const { return cells[r * metrics.size() + c]; }
};

// One-hot encodes `labels` per RMC and correlates each indicator with
// each metric (Spearman and Kendall). Bonferroni and BH run separately for
// each coefficient over all m = |rmcs| * |metrics| cells; undefined cells
// count toward m with p = 1. NaN metric values mark missing data; each cell
// uses the rows where its metric is present.
CorrelationMatrix build_correlation_matrix(const std::vector<std::string>& labels,
                                           const std::vector<std::string>& rmcs,
                                           const std::vector<NamedColumn>& metrics, double alpha = 0.05);

// rmc,metric,rho,tau,p_raw,p_bonf_reject,p_bh,tau_p_raw,tau_p_bonf_reject,tau_p_bh
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m);

}  // namespace refwhy::stats

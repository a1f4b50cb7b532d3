#pragma once

#include "refwhy/stats/result.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace refwhy::stats {

// Square rater-agreement table; rows are rater A, columns rater B.
struct ContingencyTable {
    std::vector<std::string> labels;
    std::vector<std::vector<std::int64_t>> counts;

    std::size_t k() const { return labels.size(); }
    std::int64_t total() const;
    void validate() const;  // throws InvalidTable

    // Cross-tabulates paired labels; `labels` fixes the order (pairs with
    // a label outside it throw InvalidTable).
    static ContingencyTable from_pairs(const std::vector<std::string>& labels,
                                       const std::vector<std::pair<std::string, std::string>>& pairs);
};

// extra: std_err, ci_low, ci_high (kappa +- 1.96 SE), std_err_null, z,
// p_two_sided. p_value is the one-sided test for kappa > 0.
TestResult cohen_kappa(const ContingencyTable& table);

// Symmetry of disagreement. With no off-diagonal mass the result is
// statistic 0, df 0, p 1 and extra["no_off_diagonal_mass"] = 1.
TestResult bowker_test(const ContingencyTable& table);

// 2x2 only; (b - c)^2 / (b + c) without continuity correction.
TestResult mcnemar_test(const ContingencyTable& table);

// Diagonal share of the table.
double raw_agreement(const ContingencyTable& table);

}  // namespace refwhy::stats

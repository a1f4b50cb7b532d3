#pragma once

#include "refwhy/stats/result.hpp"

#include <vector>

namespace refwhy::stats {

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> mid_ranks(const std::vector<double>& v);

// Pearson correlation of mid-ranks; two-sided p from the t approximation
// with n - 2 degrees of freedom.
TestResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

// Kendall tau-b in O(n log n) (Knight's merge-sort counting); two-sided p
// from the normal approximation with the tie-adjusted variance of S.
// extra: s (concordant minus discordant), var_s, z.
TestResult kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace refwhy::stats

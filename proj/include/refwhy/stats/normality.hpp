#pragma once

#include "refwhy/stats/result.hpp"

#include <vector>

namespace refwhy::stats {

// Anderson-Darling test against a normal with estimated mean and variance.
// statistic is the small-sample adjusted A*^2; extra carries a2 (raw),
// reject_at_005 (0/1), mean and sd. Needs n >= 8.
TestResult anderson_darling_normal(std::vector<double> samples);

}  // namespace refwhy::stats

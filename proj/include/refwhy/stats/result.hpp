#pragma once

#include "refwhy/error.hpp"

#include <map>
#include <optional>
#include <string>

namespace refwhy::stats {

REFWHY_DEFINE_ERROR(InvalidTable);
REFWHY_DEFINE_ERROR(DegenerateTable);
REFWHY_DEFINE_ERROR(TooFewSamples);
REFWHY_DEFINE_ERROR(ZeroVariance);
REFWHY_DEFINE_ERROR(LengthMismatch);

struct TestResult {
    double statistic = 0;
    double p_value = 1;
    std::optional<int> df;
    std::map<std::string, double> extra;
};

// Upper-tail probabilities, clamped to [0, 1].
double chi_squared_sf(double x, double df);
double normal_sf(double z);
double student_t_two_sided(double t, double df);

}  // namespace refwhy::stats

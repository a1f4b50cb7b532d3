#pragma once

#include <cstddef>
#include <vector>

namespace refwhy::stats {

struct BonferroniResult {
    double threshold = 0;            // alpha / m
    std::vector<std::size_t> rejections;  // ascending indices with p < threshold
};

struct BHResult {
    std::vector<std::size_t> rejections;  // ascending indices
    std::vector<double> p_adjusted;       // original order
};

// Both throw DomainError for alpha outside (0, 1) or an empty vector.
BonferroniResult bonferroni(const std::vector<double>& p, double alpha);
BHResult benjamini_hochberg(const std::vector<double>& p, double alpha);

}  // namespace refwhy::stats

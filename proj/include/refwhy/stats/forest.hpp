#pragma once

#include "refwhy/error.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace refwhy::stats {

REFWHY_DEFINE_ERROR(SingleClass);
REFWHY_DEFINE_ERROR(EmptyDataset);

// Row-major feature matrix with integer class labels in [0, n_classes).
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;

    void validate() const;
};

struct ForestConfig {
    std::size_t n_trees = 500;
    std::size_t mtry = 0;  // 0 = floor(sqrt(#features)), at least 1
    std::size_t min_leaf = 1;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct FeatureImportance {
    std::string feature;
    double mda = 0;  // mean OOB accuracy drop, in percentage points
    double mdg = 0;  // mean total Gini decrease per tree
};

struct ForestReport {
    std::vector<FeatureImportance> importance;  // feature order
    double oob_accuracy = 0;                    // majority vote over OOB trees
    std::size_t oob_rows = 0;                   // rows that were OOB at least once
};

// Trees are independent given per-tree seeds derived from config.seed, so
// the result does not depend on the thread count.
ForestReport rf_train_and_importance(const Dataset& data, const ForestConfig& config);

}  // namespace refwhy::stats

#pragma once

#include "refwhy/history/commit.hpp"
#include "refwhy/metrics/metric_vector.hpp"

#include <map>
#include <regex>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace refwhy::metrics {

struct MetricsConfig {
    std::int64_t adev_window_days = 180;
    std::int64_t rexp_window_days = 30;
    std::int64_t clock_skew_tolerance_s = 86400;
    std::vector<std::string> fix_keywords = {"fix", "fixes", "fixed", "bug",
                                             "bugs", "defect", "defects", "patch"};
};

struct MetricWarning {
    std::string kind;  // "OutOfOrderCommit" or "UnknownParentState"
    std::string commit_id;
    std::string detail;
};

double entropy(const std::vector<std::int64_t>& churns);

struct Ownership {
    double own = 0;
    std::int64_t minor = 0;
};
Ownership ownership(const std::map<std::string, std::int64_t>& added_by_author);

class FixDetector {
public:
    explicit FixDetector(const std::vector<std::string>& keywords = MetricsConfig{}.fix_keywords);
    bool operator()(const std::string& message) const;

private:
    std::regex re_;
};

bool detect_fix(const std::string& message);

// Stateful fold over one repository's commit stream. Every emitted vector
// describes the repository strictly before the commit for the cumulative
// metrics, and the commit itself for the per-commit ones.
class MetricsAccumulator {
public:
    explicit MetricsAccumulator(MetricsConfig cfg = {});

    std::vector<MetricVector> accumulate(const history::CommitRecord& commit);

    const std::vector<MetricWarning>& warnings() const { return warnings_; }

private:
    struct Lineage {
        std::vector<std::size_t> commits;  // indices into commits_
        std::map<std::string, std::int64_t> added_by;
        std::set<std::size_t> co_changed;  // lineage ids
    };
    struct CommitInfo {
        std::string author;
        std::int64_t timestamp = 0;
        std::set<std::string> dirs;
    };

    void warn(const std::string& kind, const std::string& commit, const std::string& detail);

    MetricsConfig cfg_;
    FixDetector fix_;
    std::vector<Lineage> lineages_;
    std::unordered_map<std::string, std::size_t> path_to_lineage_;
    std::vector<CommitInfo> commits_;
    std::map<std::string, std::int64_t> author_added_;
    std::int64_t project_added_ = 0;
    std::map<std::pair<std::string, std::string>, std::int64_t> author_dir_commits_;
    std::int64_t max_timestamp_ = INT64_MIN;
    std::vector<MetricWarning> warnings_;
};

}  // namespace refwhy::metrics

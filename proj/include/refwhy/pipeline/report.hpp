#pragma once

#include "refwhy/stats/agreement.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace refwhy::pipeline {

// κ (with SE, CI and one-sided p), Bowker, McNemar for 2×2, and raw
// agreement for one table. Statistics that are undefined for the table
// (e.g. κ when p_e = 1) are null with a reason alongside.
nlohmann::json table_report(const stats::ContingencyTable& table);

struct Share {
    std::string label;
    std::int64_t count = 0;
    double percent = 0;
};

std::vector<Share> label_shares(const std::vector<std::pair<std::string, std::int64_t>>& counts);

// CSV with columns rater_a,rater_b,count (any header names; first three
// columns). Label order is order of first appearance.
stats::ContingencyTable read_agreement_table(const std::filesystem::path& path);
// CSV with columns label,count.
std::vector<std::pair<std::string, std::int64_t>> read_label_counts(const std::filesystem::path& path);

}  // namespace refwhy::pipeline

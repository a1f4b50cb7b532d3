#include "refwhy/pipeline/report.hpp"

#include "refwhy/util/csv.hpp"
#include "refwhy/util/text.hpp"

#include <algorithm>
#include <map>

namespace refwhy::pipeline {

using nlohmann::json;

namespace {

json test_json(const stats::TestResult& r) {
    json j = {{"statistic", r.statistic}, {"p_value", r.p_value}};
    j["df"] = r.df ? json(*r.df) : json(nullptr);
    return j;
}

std::int64_t parse_count(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
    auto v = util::parse_int(util::trim(cell));
    if (!v || *v < 0)
        throw MalformedCsv(path.string() + ":" + std::to_string(line) + ": bad count '" + cell + "'");
    return *v;
}

}  // namespace

json table_report(const stats::ContingencyTable& table) {
    table.validate();
    json out = {{"labels", table.labels}, {"counts", table.counts}, {"n", table.total()}};
    std::int64_t agreed = 0;
    for (std::size_t i = 0; i < table.k(); ++i) agreed += table.counts[i][i];
    const double raw = stats::raw_agreement(table);
    out["raw_agreement"] = {{"agreed", agreed}, {"n", table.total()}, {"percent", 100.0 * raw}};
    try {
        auto k = stats::cohen_kappa(table);
        out["kappa"] = {{"value", k.statistic},          {"std_err", k.extra.at("std_err")},
                        {"ci_low", k.extra.at("ci_low")}, {"ci_high", k.extra.at("ci_high")},
                        {"z", k.extra.at("z")},           {"p_value", k.p_value},
                        {"p_two_sided", k.extra.at("p_two_sided")}};
    } catch (const Error& e) {
        out["kappa"] = nullptr;
        out["kappa_undefined"] = e.what();
    }
    out["bowker"] = test_json(stats::bowker_test(table));
    if (table.k() == 2) out["mcnemar"] = test_json(stats::mcnemar_test(table));
    return out;
}

std::vector<Share> label_shares(const std::vector<std::pair<std::string, std::int64_t>>& counts) {
    std::int64_t total = 0;
    for (const auto& [label, n] : counts) {
        if (n < 0) throw DomainError("negative count for label " + label);
        total += n;
    }
    if (total == 0) throw DomainError("label counts sum to zero");
    std::vector<Share> out;
    for (const auto& [label, n] : counts)
        out.push_back({label, n, 100.0 * static_cast<double>(n) / static_cast<double>(total)});
    return out;
}

stats::ContingencyTable read_agreement_table(const std::filesystem::path& path) {
    auto csv = util::read_csv_file(path.string());
    std::vector<std::string> labels;
    auto label_index = [&](const std::string& l) {
        auto it = std::find(labels.begin(), labels.end(), l);
        if (it != labels.end()) return static_cast<std::size_t>(it - labels.begin());
        labels.push_back(l);
        return labels.size() - 1;
    };
    std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> cells;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        if (row.size() < 3) throw MalformedCsv(path.string() + ":" + std::to_string(csv.lines[r]) + ": expected 3 columns");
        auto a = label_index(util::trim(row[0]));
        auto b = label_index(util::trim(row[1]));
        cells.emplace_back(a, b, parse_count(row[2], path, csv.lines[r]));
    }
    stats::ContingencyTable t;
    t.labels = labels;
    t.counts.assign(labels.size(), std::vector<std::int64_t>(labels.size(), 0));
    for (auto [a, b, n] : cells) t.counts[a][b] += n;
    t.validate();
    return t;
}

std::vector<std::pair<std::string, std::int64_t>> read_label_counts(const std::filesystem::path& path) {
    auto csv = util::read_csv_file(path.string());
    std::vector<std::pair<std::string, std::int64_t>> out;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        if (row.size() < 2) throw MalformedCsv(path.string() + ":" + std::to_string(csv.lines[r]) + ": expected 2 columns");
        out.emplace_back(util::trim(row[0]), parse_count(row[1], path, csv.lines[r]));
    }
    return out;
}

}  // namespace refwhy::pipeline

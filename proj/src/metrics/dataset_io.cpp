#include "refwhy/metrics/dataset_io.hpp"

#include "refwhy/util/csv.hpp"
#include "refwhy/util/text.hpp"

#include <spdlog/spdlog.h>

#include <unordered_map>

namespace refwhy::metrics {

namespace {

std::string key(const std::string& commit, const std::string& file) {
    return commit + '\0' + file;
}

}  // namespace

IngestReport ingest_product_metrics(const std::string& csv_path, std::vector<MetricVector>& vectors,
                                    const ReadabilityThresholds& thresholds) {
    auto table = util::read_csv_file(csv_path);
    int commit_col = table.column("commit");
    int file_col = table.column("file");
    if (commit_col < 0 || file_col < 0)
        throw MalformedCsv(csv_path + ": header must contain 'commit' and 'file'");

    std::vector<std::pair<int, std::string>> numeric_cols;
    int cat_col = -1;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        const auto& h = table.header[i];
        if (static_cast<int>(i) == commit_col || static_cast<int>(i) == file_col) continue;
        if (h == "COMREAD_cat")
            cat_col = static_cast<int>(i);
        else if (ProductMetrics{}.numeric(h))
            numeric_cols.emplace_back(static_cast<int>(i), h);
        else
            spdlog::warn("{}: ignoring unknown product column '{}'", csv_path, h);
    }

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < vectors.size(); ++i)
        index.emplace(key(vectors[i].commit_id, vectors[i].file_path), i);

    IngestReport report;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto cell = [&](int c) -> std::string { return c < static_cast<int>(row.size()) ? row[c] : ""; };
        ProductMetrics pm;
        bool bad = false;
        for (const auto& [col, name] : numeric_cols) {
            std::string text = util::trim(cell(col));
            if (text.empty()) continue;
            auto v = util::parse_double(text);
            if (!v || *v < 0) {
                spdlog::warn("{}:{}: TypeError: column {} value '{}' is not a non-negative number; row skipped",
                             csv_path, table.lines[r], name, text);
                bad = true;
                break;
            }
            *pm.numeric(name) = *v;
        }
        if (bad) {
            ++report.skipped;
            continue;
        }
        if (pm.COMREAD_val) pm.COMREAD_cat = categorize_readability(*pm.COMREAD_val, thresholds);
        if (cat_col >= 0) {
            std::string text = util::trim(cell(cat_col));
            if (!text.empty()) {
                auto level = readability_from_string(text);
                if (!level) {
                    spdlog::warn("{}:{}: TypeError: COMREAD_cat '{}' unknown; row skipped", csv_path,
                                 table.lines[r], text);
                    ++report.skipped;
                    continue;
                }
                if (pm.COMREAD_cat && *pm.COMREAD_cat != *level)
                    spdlog::warn("{}:{}: COMREAD_cat '{}' disagrees with thresholds; using '{}'",
                                 csv_path, table.lines[r], text, to_string(*pm.COMREAD_cat));
                if (!pm.COMREAD_cat) pm.COMREAD_cat = level;
            }
        }
        auto it = index.find(key(cell(commit_col), cell(file_col)));
        if (it == index.end()) {
            ++report.unmatched;
            report.unmatched_keys.push_back(cell(commit_col) + ":" + cell(file_col));
            continue;
        }
        vectors[it->second].product = pm;
        ++report.joined;
    }
    if (report.unmatched)
        spdlog::warn("{}: {} product row(s) did not match any mined (commit, file)", csv_path,
                     report.unmatched);
    return report;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricVector>& vectors) {
    bool with_product = false;
    for (const auto& v : vectors) with_product = with_product || v.product.has_value();

    std::vector<std::string> header = {"commit", "file"};
    for (const auto& n : process_metric_names()) header.push_back(n);
    if (with_product) {
        for (const auto& n : ProductMetrics::numeric_names()) header.push_back(n);
        header.push_back("COMREAD_cat");
    }
    util::write_csv_row(out, header);

    for (const auto& v : vectors) {
        std::vector<std::string> row = {v.commit_id, v.file_path};
        for (const auto& n : process_metric_names()) {
            double x = *v.process_value(n);
            row.push_back(is_ratio_metric(n) ? util::format_double(x)
                                             : std::to_string(static_cast<long long>(x)));
        }
        if (with_product) {
            for (const auto& n : ProductMetrics::numeric_names()) {
                const std::optional<double>* p = v.product ? v.product->numeric(n) : nullptr;
                row.push_back(p && *p ? util::format_double(**p) : "");
            }
            row.push_back(v.product && v.product->COMREAD_cat ? to_string(*v.product->COMREAD_cat) : "");
        }
        util::write_csv_row(out, row);
    }
}

std::vector<MetricVector> read_metrics_csv(const std::string& path) {
    auto table = util::read_csv_file(path);
    int commit_col = table.column("commit");
    int file_col = table.column("file");
    if (commit_col < 0 || file_col < 0) throw MalformedCsv(path + ": missing commit/file columns");
    std::vector<MetricVector> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        MetricVector v;
        v.commit_id = row.at(commit_col);
        v.file_path = row.at(file_col);
        ProductMetrics pm;
        bool any_product = false;
        for (std::size_t c = 0; c < table.header.size() && c < row.size(); ++c) {
            const auto& h = table.header[c];
            if (h == "commit" || h == "file" || row[c].empty()) continue;
            if (h == "COMREAD_cat") {
                pm.COMREAD_cat = readability_from_string(row[c]);
                any_product = true;
                continue;
            }
            auto val = util::parse_double(row[c]);
            if (!val)
                throw TypeError(path + ":" + std::to_string(table.lines[r]) + ": column " + h +
                                " is not numeric");
            if (auto* p = pm.numeric(h)) {
                *p = *val;
                any_product = true;
                continue;
            }
            auto i = [&] { return static_cast<std::int64_t>(*val); };
            if (h == "COMM") v.COMM = i();
            else if (h == "ADEV") v.ADEV = i();
            else if (h == "DDEV") v.DDEV = i();
            else if (h == "ADD") v.ADD = *val;
            else if (h == "DELE") v.DELE = *val;
            else if (h == "OWN") v.OWN = *val;
            else if (h == "MINOR") v.MINOR = i();
            else if (h == "SCTR") v.SCTR = i();
            else if (h == "NADEV") v.NADEV = i();
            else if (h == "NDDEV") v.NDDEV = i();
            else if (h == "NCOMM") v.NCOMM = i();
            else if (h == "NSCTR") v.NSCTR = i();
            else if (h == "OEXP") v.OEXP = *val;
            else if (h == "EXP") v.EXP = *val;
            else if (h == "ND") v.ND = i();
            else if (h == "NS") v.NS = i();
            else if (h == "NF") v.NF = i();
            else if (h == "ENTROPY") v.ENTROPY = *val;
            else if (h == "LA") v.LA = i();
            else if (h == "LD") v.LD = i();
            else if (h == "LT") v.LT = i();
            else if (h == "FIX") v.FIX = *val != 0;
            else if (h == "NDEV") v.NDEV = i();
            else if (h == "AGE") v.AGE = *val;
            else if (h == "NUC") v.NUC = i();
            else if (h == "CEXP") v.CEXP = i();
            else if (h == "REXP") v.REXP = i();
            else if (h == "SEXP") v.SEXP = i();
        }
        if (any_product) v.product = pm;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace refwhy::metrics

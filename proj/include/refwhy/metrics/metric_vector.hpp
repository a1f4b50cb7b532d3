#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refwhy::metrics {

enum class ReadabilityLevel { Low, Medium, High };

const char* to_string(ReadabilityLevel l);
std::optional<ReadabilityLevel> readability_from_string(std::string_view s);

struct ReadabilityThresholds {
    double low = 0.4;
    double high = 0.7;
};

ReadabilityLevel categorize_readability(double value, const ReadabilityThresholds& t);

// Externally computed product metrics (CK suite plus readability); any field
// may be absent when the producing tool did not report it.
struct ProductMetrics {
    std::optional<double> CBO, WMC, RFC, ELOC, NOM, NOPM, DIT, NOC, NOF, NOSF, NOPF, NOSM,
        NOSI, HsLCOM, COMREAD_val;
    std::optional<ReadabilityLevel> COMREAD_cat;

    // Numeric fields in CSV column order (COMREAD_cat excluded).
    static const std::vector<std::string>& numeric_names();
    std::optional<double>* numeric(std::string_view name);
    const std::optional<double>* numeric(std::string_view name) const;
};

struct MetricVector {
    std::string commit_id;
    std::string file_path;

    std::int64_t COMM = 0, ADEV = 0, DDEV = 0, MINOR = 0, SCTR = 0, NADEV = 0, NDDEV = 0,
                 NCOMM = 0, NSCTR = 0, NDEV = 0, NUC = 0, CEXP = 0, REXP = 0, SEXP = 0,
                 ND = 0, NS = 0, NF = 0;
    double ADD = 0, DELE = 0, OWN = 0, OEXP = 0, EXP = 0, ENTROPY = 0;
    std::int64_t LA = 0, LD = 0, LT = 0;
    double AGE = 0;
    bool FIX = false;

    std::optional<ProductMetrics> product;

    // Process metric by name (FIX as 0/1); nullopt for unknown names.
    std::optional<double> process_value(std::string_view name) const;
    // Process or product metric by name; nullopt when absent.
    std::optional<double> value(std::string_view name) const;
};

// The 28 process metrics in output-column order.
const std::vector<std::string>& process_metric_names();
bool is_ratio_metric(std::string_view name);

}  // namespace refwhy::metrics

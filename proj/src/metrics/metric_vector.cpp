#include "refwhy/metrics/metric_vector.hpp"

namespace refwhy::metrics {

const char* to_string(ReadabilityLevel l) {
    switch (l) {
    case ReadabilityLevel::Low: return "Low";
    case ReadabilityLevel::Medium: return "Medium";
    case ReadabilityLevel::High: return "High";
    }
    return "Low";
}

std::optional<ReadabilityLevel> readability_from_string(std::string_view s) {
    if (s == "Low" || s == "low") return ReadabilityLevel::Low;
    if (s == "Medium" || s == "medium") return ReadabilityLevel::Medium;
    if (s == "High" || s == "high") return ReadabilityLevel::High;
    return std::nullopt;
}

ReadabilityLevel categorize_readability(double value, const ReadabilityThresholds& t) {
    if (value < t.low) return ReadabilityLevel::Low;
    if (value < t.high) return ReadabilityLevel::Medium;
    return ReadabilityLevel::High;
}

const std::vector<std::string>& ProductMetrics::numeric_names() {
    static const std::vector<std::string> names = {
        "CBO", "WMC", "RFC", "ELOC", "NOM", "NOPM", "DIT", "NOC",
        "NOF", "NOSF", "NOPF", "NOSM", "NOSI", "HsLCOM", "COMREAD_val",
    };
    return names;
}

std::optional<double>* ProductMetrics::numeric(std::string_view n) {
    if (n == "CBO") return &CBO;
    if (n == "WMC") return &WMC;
    if (n == "RFC") return &RFC;
    if (n == "ELOC") return &ELOC;
    if (n == "NOM") return &NOM;
    if (n == "NOPM") return &NOPM;
    if (n == "DIT") return &DIT;
    if (n == "NOC") return &NOC;
    if (n == "NOF") return &NOF;
    if (n == "NOSF") return &NOSF;
    if (n == "NOPF") return &NOPF;
    if (n == "NOSM") return &NOSM;
    if (n == "NOSI") return &NOSI;
    if (n == "HsLCOM") return &HsLCOM;
    if (n == "COMREAD_val") return &COMREAD_val;
    return nullptr;
}

const std::optional<double>* ProductMetrics::numeric(std::string_view n) const {
    return const_cast<ProductMetrics*>(this)->numeric(n);
}

const std::vector<std::string>& process_metric_names() {
    static const std::vector<std::string> names = {
        "COMM", "ADEV", "DDEV", "ADD", "DELE", "OWN", "MINOR", "SCTR", "NADEV", "NDDEV",
        "NCOMM", "NSCTR", "OEXP", "EXP", "ND", "NS", "NF", "ENTROPY", "LA", "LD",
        "LT", "FIX", "NDEV", "AGE", "NUC", "CEXP", "REXP", "SEXP",
    };
    return names;
}

bool is_ratio_metric(std::string_view n) {
    return n == "ADD" || n == "DELE" || n == "OWN" || n == "OEXP" || n == "EXP" ||
           n == "ENTROPY" || n == "AGE";
}

std::optional<double> MetricVector::process_value(std::string_view n) const {
    auto d = [](std::int64_t v) { return static_cast<double>(v); };
    if (n == "COMM") return d(COMM);
    if (n == "ADEV") return d(ADEV);
    if (n == "DDEV") return d(DDEV);
    if (n == "ADD") return ADD;
    if (n == "DELE") return DELE;
    if (n == "OWN") return OWN;
    if (n == "MINOR") return d(MINOR);
    if (n == "SCTR") return d(SCTR);
    if (n == "NADEV") return d(NADEV);
    if (n == "NDDEV") return d(NDDEV);
    if (n == "NCOMM") return d(NCOMM);
    if (n == "NSCTR") return d(NSCTR);
    if (n == "OEXP") return OEXP;
    if (n == "EXP") return EXP;
    if (n == "ND") return d(ND);
    if (n == "NS") return d(NS);
    if (n == "NF") return d(NF);
    if (n == "ENTROPY") return ENTROPY;
    if (n == "LA") return d(LA);
    if (n == "LD") return d(LD);
    if (n == "LT") return d(LT);
    if (n == "FIX") return FIX ? 1.0 : 0.0;
    if (n == "NDEV") return d(NDEV);
    if (n == "AGE") return AGE;
    if (n == "NUC") return d(NUC);
    if (n == "CEXP") return d(CEXP);
    if (n == "REXP") return d(REXP);
    if (n == "SEXP") return d(SEXP);
    return std::nullopt;
}

std::optional<double> MetricVector::value(std::string_view n) const {
    if (auto v = process_value(n)) return v;
    if (!product) return std::nullopt;
    if (const auto* p = product->numeric(n)) return *p;
    return std::nullopt;
}

}  // namespace refwhy::metrics

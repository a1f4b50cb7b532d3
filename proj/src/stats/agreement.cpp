#include "refwhy/stats/agreement.hpp"

#include <cmath>
#include <set>

namespace refwhy::stats {

std::int64_t ContingencyTable::total() const {
    std::int64_t n = 0;
    for (const auto& row : counts)
        for (auto c : row) n += c;
    return n;
}

void ContingencyTable::validate() const {
    if (labels.size() < 2) throw InvalidTable("need at least two categories");
    if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size())
        throw InvalidTable("duplicate category label");
    if (counts.size() != labels.size()) throw InvalidTable("row count does not match labels");
    for (const auto& row : counts) {
        if (row.size() != labels.size()) throw InvalidTable("table is not square");
        for (auto c : row)
            if (c < 0) throw InvalidTable("negative cell count");
    }
    if (total() <= 0) throw InvalidTable("table is empty");
}

ContingencyTable ContingencyTable::from_pairs(const std::vector<std::string>& labels,
                                              const std::vector<std::pair<std::string, std::string>>& pairs) {
    ContingencyTable t;
    t.labels = labels;
    t.counts.assign(labels.size(), std::vector<std::int64_t>(labels.size(), 0));
    auto index = [&](const std::string& l) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == l) return i;
        throw InvalidTable("label '" + l + "' is not a table category");
    };
    for (const auto& [a, b] : pairs) ++t.counts[index(a)][index(b)];
    return t;
}

double raw_agreement(const ContingencyTable& table) {
    table.validate();
    std::int64_t diag = 0;
    for (std::size_t i = 0; i < table.k(); ++i) diag += table.counts[i][i];
    return static_cast<double>(diag) / static_cast<double>(table.total());
}

TestResult cohen_kappa(const ContingencyTable& table) {
    table.validate();
    const std::size_t k = table.k();
    const double n = static_cast<double>(table.total());
    std::vector<std::vector<double>> p(k, std::vector<double>(k));
    std::vector<double> row(k, 0), col(k, 0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            p[i][j] = static_cast<double>(table.counts[i][j]) / n;
            row[i] += p[i][j];
            col[j] += p[i][j];
        }
    double po = 0, pe = 0;
    for (std::size_t i = 0; i < k; ++i) {
        po += p[i][i];
        pe += row[i] * col[i];
    }
    if (std::fabs(1 - pe) < 1e-15)
        throw DegenerateTable("chance agreement is 1; kappa is undefined");
    const double kappa = (po - pe) / (1 - pe);

    // Large-sample variance of Fleiss, Cohen and Everitt.
    double a = 0, b = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double t = 1 - (row[i] + col[i]) * (1 - kappa);
        a += p[i][i] * t * t;
        for (std::size_t j = 0; j < k; ++j)
            if (i != j) b += p[i][j] * (col[i] + row[j]) * (col[i] + row[j]);
    }
    b *= (1 - kappa) * (1 - kappa);
    const double c = (kappa - pe * (1 - kappa)) * (kappa - pe * (1 - kappa));
    const double denom = n * (1 - pe) * (1 - pe);
    const double se = std::sqrt(std::max(0.0, a + b - c) / denom);

    // Variance under H0: kappa = 0, for the z test.
    double s0 = pe + pe * pe;
    for (std::size_t i = 0; i < k; ++i) s0 -= row[i] * col[i] * (row[i] + col[i]);
    const double se0 = std::sqrt(std::max(0.0, s0) / denom);

    TestResult r;
    r.statistic = kappa;
    const double z = se0 > 0 ? kappa / se0 : (kappa > 0 ? INFINITY : 0.0);
    r.p_value = normal_sf(z);
    r.extra["std_err"] = se;
    r.extra["ci_low"] = kappa - 1.96 * se;
    r.extra["ci_high"] = kappa + 1.96 * se;
    r.extra["std_err_null"] = se0;
    r.extra["z"] = z;
    r.extra["p_two_sided"] = std::min(1.0, 2 * normal_sf(std::fabs(z)));
    r.extra["p_observed"] = po;
    r.extra["p_expected"] = pe;
    return r;
}

TestResult bowker_test(const ContingencyTable& table) {
    table.validate();
    TestResult r;
    double chi2 = 0;
    int df = 0;
    for (std::size_t i = 0; i < table.k(); ++i)
        for (std::size_t j = i + 1; j < table.k(); ++j) {
            const auto nij = table.counts[i][j], nji = table.counts[j][i];
            if (nij + nji == 0) continue;
            const double d = static_cast<double>(nij - nji);
            chi2 += d * d / static_cast<double>(nij + nji);
            ++df;
        }
    r.statistic = chi2;
    r.df = df;
    if (df == 0) {
        r.p_value = 1.0;
        r.extra["no_off_diagonal_mass"] = 1;
        return r;
    }
    r.p_value = chi_squared_sf(chi2, df);
    return r;
}

TestResult mcnemar_test(const ContingencyTable& table) {
    table.validate();
    if (table.k() != 2) throw InvalidTable("McNemar needs a 2x2 table");
    const auto b = table.counts[0][1], c = table.counts[1][0];
    TestResult r;
    r.df = 1;
    if (b + c == 0) return r;
    const double d = static_cast<double>(b - c);
    r.statistic = d * d / static_cast<double>(b + c);
    r.p_value = chi_squared_sf(r.statistic, 1);
    return r;
}

}  // namespace refwhy::stats

// One PASS/FAIL line per acceptance criterion, with elapsed time against
// its budget. Exit status is non-zero when any criterion fails.
#include "fixtures.hpp"
#include "llm_fixtures.hpp"
#include "pipeline_fixtures.hpp"
#include "refwhy/llm/mock.hpp"
#include "refwhy/llm/orchestrator.hpp"
#include "refwhy/pipeline/config.hpp"
#include "refwhy/pipeline/report.hpp"
#include "refwhy/pipeline/stages.hpp"
#include "refwhy/sampler/sampler.hpp"
#include "refwhy/stats/agreement.hpp"
#include "refwhy/stats/corrections.hpp"
#include "refwhy/stats/correlation_matrix.hpp"
#include "refwhy/stats/forest.hpp"
#include "refwhy/stats/normality.hpp"
#include "refwhy/stats/rank.hpp"
#include "refwhy/util/csv.hpp"
#include "refwhy/util/ndjson.hpp"
#include "refwhy/util/process.hpp"
#include "refwhy/util/rng.hpp"
#include "refwhy/util/text.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

using namespace refwhy;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    // Records a failed expectation; the first few are reported.
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        if (pass) detail << "failed: ";
        else detail << "; ";
        pass = false;
        detail << what;
    }
};

struct Criterion {
    std::string name;
    double budget_s;
    std::function<void(Verdict&)> body;
};

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::string num(double v, int decimals = 6) { return util::format_fixed(v, decimals); }

const stats::ContingencyTable kPublished = {{"No", "Yes"}, {{59, 8}, {34, 97}}};

// ---- golden numbers ---------------------------------------------------------

double kappa_seconds = 0;

void kappa_golden(Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    auto k = stats::cohen_kappa(kPublished);
    kappa_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.expect(near(k.statistic, 0.567, 0.001), "kappa " + num(k.statistic));
    v.expect(near(k.extra.at("ci_low"), 0.455, 0.01), "ci_low " + num(k.extra.at("ci_low")));
    v.expect(near(k.extra.at("ci_high"), 0.679, 0.01), "ci_high " + num(k.extra.at("ci_high")));
    v.expect(k.p_value < 1e-4, "p " + util::format_double(k.p_value));
    v.expect(kappa_seconds < 1e-3, "call took " + num(kappa_seconds * 1e3, 3) + " ms");
    if (v.pass)
        v.detail << "kappa=" << num(k.statistic, 4) << " CI=[" << num(k.extra.at("ci_low"), 4) << ", "
                 << num(k.extra.at("ci_high"), 4) << "] p=" << util::format_double(k.p_value) << " call "
                 << num(kappa_seconds * 1e6, 1) << " us";
}

void bowker_golden(Verdict& v) {
    auto b = stats::bowker_test(kPublished);
    auto m = stats::mcnemar_test(kPublished);
    v.expect(near(b.statistic, 16.095, 0.001), "chi2 " + num(b.statistic));
    v.expect(b.df == 1, "df");
    v.expect(b.p_value < 1e-4, "p " + util::format_double(b.p_value));
    v.expect(m.statistic == b.statistic && m.p_value == b.p_value, "McNemar differs from Bowker");
    if (v.pass)
        v.detail << "chi2=" << num(b.statistic, 4) << " df=1 p=" << util::format_double(b.p_value)
                 << " McNemar identical";
}

void bonferroni_golden(Verdict& v) {
    auto r = stats::bonferroni(std::vector<double>(574, 0.5), 0.05);
    v.expect(near(r.threshold, 8.7108e-5, 1e-9), "threshold " + util::format_double(r.threshold));
    if (v.pass) v.detail << "0.05/574=" << util::format_double(r.threshold);
}

void cochran_golden(Verdict& v) {
    const auto n = sampler::cochran_n(0.95, 0.05);
    v.expect(n == 385, "n=" + std::to_string(n));
    if (v.pass) v.detail << "n=385";
}

void alignment_arithmetic(Verdict& v) {
    const auto tables = testing::source_dir() / "data" / "published_tables";
    auto shares = pipeline::label_shares(pipeline::read_label_counts(tables / "alignment_labels.csv"));
    const std::vector<std::pair<std::string, double>> expected = {{"Yes", 53.03}, {"No", 24.74}, {"Extends", 22.22}};
    v.expect(shares.size() == 3, "expected three labels");
    for (std::size_t i = 0; i < std::min<std::size_t>(3, shares.size()); ++i) {
        v.expect(shares[i].label == expected[i].first, "label order");
        v.expect(near(shares[i].percent, expected[i].second, 0.01),
                 shares[i].label + " " + num(shares[i].percent, 4) + "%");
    }
    auto rep = pipeline::table_report(pipeline::read_agreement_table(tables / "alignment_agreement.csv"));
    const auto& raw = rep["raw_agreement"];
    v.expect(raw["agreed"] == 156 && raw["n"] == 198, "raw agreement counts");
    v.expect(near(raw["percent"].get<double>(), 78.79, 0.01), "raw " + num(raw["percent"].get<double>(), 4));
    if (v.pass)
        v.detail << "shares " << num(shares[0].percent, 3) << "/" << num(shares[1].percent, 3) << "/"
                 << num(shares[2].percent, 3) << "%, raw 156/198=" << num(raw["percent"].get<double>(), 3) << "%";
}

// ---- metrics ----------------------------------------------------------------

double mine_seconds = 0;

void metric_oracle(Verdict& v) {
    testing::TempDir tmp("refwhy-acc-mine");
    auto ws = testing::make_pipeline_workspace(tmp.path());
    auto cfg = pipeline::load_config(ws.config);
    const auto t0 = std::chrono::steady_clock::now();
    auto out = pipeline::run_mine(cfg);
    mine_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.expect(out.exit_code == 0, "mine exit " + std::to_string(out.exit_code));

    const auto mined = util::read_csv_file((cfg.stage_dir("mine") / "metrics.csv").string());
    const auto oracle =
        util::read_csv_file((testing::source_dir() / "tests" / "data" / "mini_java_expected_metrics.csv").string());
    v.expect(oracle.header.size() == 2 + 28, "oracle has " + std::to_string(oracle.header.size() - 2) + " metrics");
    v.expect(mined.rows.size() == oracle.rows.size(), "row count");
    std::map<std::pair<std::string, std::string>, const std::vector<std::string>*> index;
    for (const auto& row : mined.rows) index[{row[0], row[1]}] = &row;
    std::size_t compared = 0, mismatches = 0;
    for (const auto& row : oracle.rows) {
        auto it = index.find({row[0], row[1]});
        if (it == index.end()) {
            ++mismatches;
            continue;
        }
        for (std::size_t c = 2; c < oracle.header.size(); ++c) {
            const auto got = util::parse_double((*it->second)[static_cast<std::size_t>(mined.column(oracle.header[c]))]);
            const auto want = util::parse_double(row[c]);
            const bool is_count = row[c].find('.') == std::string::npos;
            const bool ok = got && want && (is_count ? *got == *want : near(*got, *want, 1e-9));
            mismatches += !ok;
            ++compared;
        }
    }
    v.expect(mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(compared) + " values differ");
    v.expect(mine_seconds < 10, "mine took " + num(mine_seconds, 2) + " s");
    if (v.pass)
        v.detail << compared << " values over " << oracle.rows.size() << " (commit, file) pairs match; mine stage "
                 << num(mine_seconds, 3) << " s";
}

// ---- sampler ----------------------------------------------------------------

std::vector<sampler::Candidate> synthetic_population(util::Rng& rng, std::size_t projects, std::size_t types,
                                                     std::size_t max_per_cell) {
    std::vector<sampler::Candidate> pop;
    for (std::size_t p = 0; p < projects; ++p)
        for (std::size_t t = 0; t < types; ++t) {
            const auto n = rng.uniform_index(max_per_cell + 1);
            for (std::size_t k = 0; k < n; ++k)
                pop.push_back({"p" + std::to_string(p) + "/t" + std::to_string(t) + "/" + std::to_string(k),
                               "c" + std::to_string(k), "p" + std::to_string(p), "t" + std::to_string(t)});
        }
    return pop;
}

void sampling_properties(Verdict& v) {
    std::size_t populations = 0, coverage_failures = 0;
    for (std::uint64_t s = 0; populations < 100; ++s) {
        util::Rng gen(util::mix_seed(8080, s));
        auto pop = synthetic_population(gen, 1 + gen.uniform_index(12), 1 + gen.uniform_index(15),
                                        1 + gen.uniform_index(6));
        if (pop.empty()) continue;
        ++populations;
        const std::size_t mp = 1 + gen.uniform_index(4), mt = 1 + gen.uniform_index(4);
        util::Rng rng(s);
        auto r = sampler::phase1_greedy(pop, mp, mt, rng);
        std::map<std::string, std::size_t> np, nt, sp, st;
        for (const auto& c : pop) ++np[c.project], ++nt[c.type];
        for (auto i : r.selected) ++sp[pop[i].project], ++st[pop[i].type];
        bool ok = std::set<std::size_t>(r.selected.begin(), r.selected.end()).size() == r.selected.size();
        for (const auto& [p, n] : np) ok = ok && sp[p] >= std::min(n, mp);
        for (const auto& [t, n] : nt) ok = ok && st[t] >= std::min(n, mt);
        coverage_failures += !ok;
    }
    v.expect(coverage_failures == 0, std::to_string(coverage_failures) + " populations miss a minimum");

    const std::size_t trials = 100000;
    std::vector<int> stream(5);
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> pairs;
    util::Rng rng(2024);
    for (std::size_t t = 0; t < trials; ++t) {
        auto pick = sampler::phase2_reservoir(stream, 2, rng);
        ++pairs[{pick.at(0), pick.at(1)}];
    }
    double chi2 = 0;
    const double expected = trials / 10.0;
    for (const auto& [k, c] : pairs) chi2 += (c - expected) * (c - expected) / expected;
    const double p = pairs.size() == 10
                         ? boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(9), chi2))
                         : 0.0;
    v.expect(p > 0.001, "reservoir chi2 p=" + util::format_double(p));

    util::Rng gen(77);
    auto pop = synthetic_population(gen, 5, 6, 6);
    sampler::SamplePlan plan;
    plan.target_n = 50;
    plan.seed = 7;
    auto bytes = [&](std::vector<sampler::Candidate> population) {
        std::ostringstream out;
        sampler::write_manifest(out, sampler::draw_sample(std::move(population), plan));
        return out.str();
    };
    const auto first = bytes(pop);
    std::reverse(pop.begin(), pop.end());
    v.expect(bytes(pop) == first, "manifest bytes differ for a fixed seed");
    if (v.pass)
        v.detail << "coverage 100/100, reservoir chi2=" << num(chi2, 2) << " p=" << num(p, 4)
                 << ", fixed-seed manifest byte-identical";
}

// ---- stats properties -------------------------------------------------------

void correction_dominance(Verdict& v) {
    util::Rng rng(4243);
    std::size_t violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + rng.uniform_index(1000);
        std::vector<double> p(m);
        for (auto& x : p) x = std::pow(rng.uniform01(), 1 + static_cast<double>(rng.uniform_index(6)));
        auto bon = stats::bonferroni(p, 0.05);
        auto bh = stats::benjamini_hochberg(p, 0.05);
        std::set<std::size_t> bhs(bh.rejections.begin(), bh.rejections.end());
        for (auto i : bon.rejections) violations += bhs.count(i) == 0;
    }
    v.expect(violations == 0, std::to_string(violations) + " Bonferroni rejections missing from BH");
    if (v.pass) v.detail << "1000 p-vectors, BH superset every time";
}

double oracle_rank(const std::vector<double>& x, std::size_t i) {
    double less = 0, equal = 0;
    for (double w : x) {
        less += w < x[i];
        equal += w == x[i];
    }
    return less + (equal + 1) / 2;
}

double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> rx(n), ry(n);
    for (std::size_t i = 0; i < n; ++i) rx[i] = oracle_rank(x, i), ry[i] = oracle_rank(y, i);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += rx[i] / n, my += ry[i] / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

double oracle_kendall(const std::vector<double>& x, const std::vector<double>& y) {
    double conc = 0, disc = 0, tx = 0, ty = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0 && dy == 0) continue;
            if (dx == 0) ++tx;
            else if (dy == 0) ++ty;
            else if ((dx > 0) == (dy > 0)) ++conc;
            else ++disc;
        }
    return (conc - disc) / std::sqrt((conc + disc + tx) * (conc + disc + ty));
}

void correlation_oracles(Verdict& v) {
    util::Rng rng(777);
    int compared = 0;
    double worst = 0;
    while (compared < 200) {
        const std::size_t n = 3 + rng.uniform_index(48);
        const std::uint64_t range = compared % 3 == 0 ? 5 : 1000;  // some vectors carry ties
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng.uniform_index(range));
            y[i] = static_cast<double>(rng.uniform_index(range));
        }
        auto constant = [](const std::vector<double>& a) {
            return std::all_of(a.begin(), a.end(), [&](double w) { return w == a[0]; });
        };
        if (constant(x) || constant(y)) continue;
        ++compared;
        worst = std::max(worst, std::fabs(stats::spearman_rho(x, y).statistic - oracle_spearman(x, y)));
        worst = std::max(worst, std::fabs(stats::kendall_tau(x, y).statistic - oracle_kendall(x, y)));
    }
    v.expect(worst <= 1e-9, "max deviation " + util::format_double(worst));
    if (v.pass) v.detail << "200 vector pairs, max |deviation| " << util::format_double(worst);
}

void ad_calibration(Verdict& v) {
    int false_rejections = 0, exp_rejections = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        util::Rng rng(util::mix_seed(500, seed));
        std::vector<double> normal, expo;
        for (int i = 0; i < 500; ++i) {
            const double u1 = 1 - rng.uniform01(), u2 = rng.uniform01();
            normal.push_back(std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2));
            expo.push_back(-std::log(1 - rng.uniform01()));
        }
        false_rejections += stats::anderson_darling_normal(normal).p_value < 0.05;
        exp_rejections += stats::anderson_darling_normal(expo).p_value < 0.05;
    }
    v.expect(false_rejections >= 1 && false_rejections <= 10,
             "false-rejection rate " + num(false_rejections / 100.0, 2));
    v.expect(exp_rejections >= 95, "exponential rejected " + std::to_string(exp_rejections) + "/100");
    if (v.pass)
        v.detail << "normal rejected " << false_rejections << "/100, exponential rejected " << exp_rejections
                 << "/100";
}

stats::Dataset planted(std::uint64_t seed) {
    util::Rng rng(seed);
    stats::Dataset d;
    for (int f = 0; f < 10; ++f) d.feature_names.push_back("f" + std::to_string(f + 1));
    d.feature_names.push_back("constant");
    d.class_names = {"neg", "pos"};
    const std::size_t rows = 500;
    for (std::size_t i = 0; i < rows; ++i) {
        std::vector<double> row(10);
        for (auto& x : row) x = rng.uniform01();
        d.labels.push_back(row[0] > 0.5 ? 1 : 0);
        row.push_back(1.0);
        d.rows.push_back(row);
    }
    std::vector<std::size_t> order(rows);
    for (std::size_t i = 0; i < rows; ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t i = 0; i < rows / 10; ++i) d.labels[order[i]] = 1 - d.labels[order[i]];
    return d;
}

std::string importance_bytes(const stats::ForestReport& r) {
    std::ostringstream out;
    for (const auto& f : r.importance) out << f.feature << ',' << util::format_double(f.mda) << ','
                                           << util::format_double(f.mdg) << '\n';
    out << util::format_double(r.oob_accuracy) << '\n';
    return out.str();
}

void rf_planted(Verdict& v) {
    int mda_first = 0, mdg_first = 0, const_nonzero = 0;
    for (int s = 0; s < 100; ++s) {
        stats::ForestConfig cfg;
        cfg.n_trees = 100;
        cfg.seed = static_cast<std::uint64_t>(s);
        auto rep = stats::rf_train_and_importance(planted(5000 + static_cast<std::uint64_t>(s)), cfg);
        auto top = [&](auto key) {
            return std::max_element(rep.importance.begin(), rep.importance.end(),
                                    [&](const auto& a, const auto& b) { return key(a) < key(b); }) -
                   rep.importance.begin();
        };
        mda_first += top([](const auto& i) { return i.mda; }) == 0;
        mdg_first += top([](const auto& i) { return i.mdg; }) == 0;
        const_nonzero += rep.importance.back().mdg != 0.0;
    }
    stats::ForestConfig cfg;
    cfg.n_trees = 100;
    cfg.seed = 42;
    const auto d = planted(42);
    const auto a = importance_bytes(stats::rf_train_and_importance(d, cfg));
    cfg.threads = 1;
    const auto b = importance_bytes(stats::rf_train_and_importance(d, cfg));
    v.expect(mda_first >= 95, "MDA first in " + std::to_string(mda_first) + "/100");
    v.expect(mdg_first >= 95, "MDG first in " + std::to_string(mdg_first) + "/100");
    v.expect(const_nonzero == 0, "constant feature MDG non-zero in " + std::to_string(const_nonzero) + " runs");
    v.expect(a == b, "importance bytes differ for one seed");
    if (v.pass)
        v.detail << "informative first by MDA " << mda_first << "/100, MDG " << mdg_first
                 << "/100; constant MDG 0 in all runs; byte-exact per seed";
}

// ---- llm --------------------------------------------------------------------

llm::MockRule validation_rule(const std::string& user, const std::string& model, bool agree) {
    llm::MockRule r;
    r.user_contains = user;
    r.model = model;
    r.schema = "validation";
    r.replies.push_back(llm::json_reply({{"decision", agree ? "agree" : "disagree"}, {"reasoning", "scripted"}}));
    r.repeat_last = true;
    return r;
}

std::string records_ndjson(const std::vector<llm::ConsensusRecord>& rs) {
    std::vector<json> lines;
    for (const auto& r : rs) lines.push_back(llm::to_json(r));
    return util::to_ndjson(lines);
}

void consensus_protocol(Verdict& v) {
    {
        llm::MockResponder mock;
        llm::MockTransport transport(mock);
        llm::TranscriptStore store;
        auto cfg = llm::default_orchestrator_config();
        auto golden = testing::install_golden_script(mock, cfg);
        llm::Orchestrator o(cfg, transport, store);
        const auto got = records_ndjson(o.extract_all(golden.cases));
        v.expect(got == util::read_file(testing::golden_consensus_path().string()),
                 "golden transcript records differ");
    }

    std::size_t arbitrated = 0, cases_n = 0, mismatches = 0;
    for (std::uint64_t script = 0; script < 20; ++script) {
        llm::MockResponder mock;
        llm::MockTransport transport(mock);
        llm::TranscriptStore store;
        auto cfg = llm::default_orchestrator_config();
        util::Rng rng(util::mix_seed(31, script));
        std::vector<llm::MotivationCase> cases;
        std::vector<bool> split;
        for (int i = 0; i < 15; ++i) {
            llm::MotivationCase c;
            c.id = "s" + std::to_string(script) + "-" + std::to_string(i);
            c.refactoring_type = "Rename Method";
            c.abbreviation = "RM";
            c.description = "Rename Method a() to b() in class " + c.id + ".";
            c.commit_id = "c" + c.id;
            c.commit_message = "rename";
            c.code_diff = "@@ -1 +1 @@\n-a()\n+b()\n";
            const bool a = rng.uniform_index(2) == 0, b = rng.uniform_index(2) == 0;
            mock.add_rule(validation_rule(c.description, cfg.roles[llm::Role::V1].model_name, a));
            mock.add_rule(validation_rule(c.description, cfg.roles[llm::Role::V2].model_name, b));
            split.push_back(a != b);
            cases.push_back(std::move(c));
        }
        llm::Orchestrator o(cfg, transport, store);
        auto records = o.extract_all(cases);
        std::size_t expected_v3 = 0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            mismatches += records[i].v3.has_value() != split[i];
            expected_v3 += split[i];
        }
        mismatches += o.network_calls(llm::Role::V3) != expected_v3;
        arbitrated += expected_v3;
        cases_n += records.size();
    }
    v.expect(mismatches == 0, std::to_string(mismatches) + " arbiter-iff-disagreement violations");

    testing::TempDir tmp("refwhy-acc-cache");
    const auto log = (tmp.path() / "transcripts.ndjson").string();
    std::vector<llm::MotivationCase> cases;
    {
        llm::MockResponder mock;
        llm::MockTransport transport(mock);
        llm::TranscriptStore store(log);
        auto cfg = llm::default_orchestrator_config();
        cases = testing::install_golden_script(mock, cfg).cases;
        llm::Orchestrator o(cfg, transport, store);
        o.extract_all(cases);
    }
    llm::MockResponder mock;
    llm::MockTransport transport(mock);
    llm::TranscriptStore store(log);
    llm::Orchestrator o(llm::default_orchestrator_config(), transport, store);
    const auto replay = records_ndjson(o.extract_all(cases));
    v.expect(o.network_calls() == 0 && mock.requests() == 0,
             "cached re-run made " + std::to_string(o.network_calls()) + " calls");
    v.expect(replay == util::read_file(testing::golden_consensus_path().string()), "cached re-run records differ");
    if (v.pass)
        v.detail << "golden 5/5 branches equal; arbiter iff split on " << cases_n << " cases (" << arbitrated
                 << " arbitrated); cached re-run 0 calls";
}

// ---- analysis shape and end to end ------------------------------------------

void matrix_shape(Verdict& v) {
    const auto& names = pipeline::analysis_metric_names();
    v.expect(names.size() == 41, std::to_string(names.size()) + " metric columns");
    util::Rng rng(14);
    std::vector<std::string> rmcs;
    for (int i = 0; i < 14; ++i) rmcs.push_back("RMC" + std::to_string(i));
    const std::size_t n = 150;
    std::vector<std::string> labels(n);
    for (auto& l : labels) l = rmcs[rng.uniform_index(14)];
    std::vector<stats::NamedColumn> columns;
    for (const auto& name : names) {
        stats::NamedColumn col{name, std::vector<double>(n)};
        for (auto& x : col.values) x = static_cast<double>(rng.uniform_index(100));
        columns.push_back(std::move(col));
    }
    auto m = stats::build_correlation_matrix(labels, rmcs, columns, 0.05);
    std::ostringstream csv;
    stats::write_correlation_csv(csv, m);
    const auto text = csv.str();
    const auto lines = std::count(text.begin(), text.end(), '\n');
    v.expect(m.m() == 574, "m=" + std::to_string(m.m()));
    v.expect(m.cells.size() == 574, "cells=" + std::to_string(m.cells.size()));
    v.expect(lines == 575, "csv rows=" + std::to_string(lines - 1));
    if (v.pass) v.detail << "14 x 41 = " << m.m() << " tested cells, Bonferroni " << util::format_double(m.bonferroni_threshold);
}

double e2e_seconds = 0;

void end_to_end(Verdict& v) {
    testing::TempDir tmp("refwhy-acc-e2e");
    auto ws = testing::make_pipeline_workspace(tmp.path());
    const auto t0 = std::chrono::steady_clock::now();
    for (std::vector<std::string> stage : {std::vector<std::string>{"mine"}, {"sample"}, {"classify", "--mock"}, {"analyze"}}) {
        std::vector<std::string> argv = {testing::cli_path().string()};
        argv.insert(argv.end(), stage.begin(), stage.end());
        argv.insert(argv.end(), {"--config", ws.config.string()});
        auto r = util::run(argv);
        v.expect(r.exit_code == 0, stage[0] + " exited " + std::to_string(r.exit_code) + ": " + util::trim(r.err));
        if (r.exit_code != 0) return;
    }
    e2e_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t files = 0;
    for (const char* stage : {"mine", "sample", "classify", "analyze"})
        for (const auto& f : pipeline::stage_artifacts(stage)) {
            const auto p = ws.output / stage / f;
            v.expect(fs::exists(p) && fs::file_size(p) > 0, "missing or empty " + (fs::path(stage) / f).string());
            ++files;
        }
    v.expect(fs::exists(ws.output / "run-log.ndjson"), "missing run-log.ndjson");
    v.expect(e2e_seconds < 60, "took " + num(e2e_seconds, 2) + " s");
    if (v.pass) v.detail << "4 stages, " << files << " artifacts present, " << num(e2e_seconds, 2) << " s";
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    const std::vector<Criterion> criteria = {
        {"kappa golden", 1.0, kappa_golden},
        {"Bowker golden", 1.0, bowker_golden},
        {"Bonferroni golden", 1.0, bonferroni_golden},
        {"Cochran golden", 1.0, cochran_golden},
        {"alignment arithmetic", 1.0, alignment_arithmetic},
        {"metric oracle", 10.0, metric_oracle},
        {"sampling properties", 60.0, sampling_properties},
        {"correction dominance", 10.0, correction_dominance},
        {"correlation oracles", 30.0, correlation_oracles},
        {"AD calibration", 30.0, ad_calibration},
        {"RF planted signal", 300.0, rf_planted},
        {"consensus protocol", 30.0, consensus_protocol},
        {"matrix shape", 1.0, matrix_shape},
        {"end-to-end --mock", 60.0, end_to_end},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(v);
        } catch (const std::exception& e) {
            v.expect(false, std::string("threw ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        v.expect(s < c.budget_s, "over budget");
        failed += !v.pass;
        std::printf("%s  %-22s %9.3f s / %5.0f s  %s\n", v.pass ? "PASS" : "FAIL", c.name.c_str(), s, c.budget_s,
                    v.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}

#include "refwhy/pipeline/stages.hpp"

#include "refwhy/history/miner.hpp"
#include "refwhy/llm/mock.hpp"
#include "refwhy/metrics/dataset_io.hpp"
#include "refwhy/pipeline/report.hpp"
#include "refwhy/pipeline/review.hpp"
#include "refwhy/refactoring/instance.hpp"
#include "refwhy/stats/correlation_matrix.hpp"
#include "refwhy/stats/forest.hpp"
#include "refwhy/stats/normality.hpp"
#include "refwhy/util/csv.hpp"
#include "refwhy/util/ndjson.hpp"
#include "refwhy/util/process.hpp"
#include "refwhy/util/text.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace refwhy::pipeline {

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "refwhy 0.1.0";

void require(const fs::path& p, const std::string& stage) {
    if (!fs::exists(p))
        throw MissingStageInput(p.string() + " is missing; run '" + stage + "' first");
}

void write(StageOutcome& out, const fs::path& path, const std::string& data) {
    util::write_file_atomic(path.string(), data);
    out.artifacts.push_back(path);
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }


std::string vkey(const std::string& commit, const std::string& file) { return commit + '\0' + file; }

// Per-repository mining result.
struct RepoRun {
    std::string project;
    fs::path path;
    std::vector<json> commits;
    std::vector<metrics::MetricVector> vectors;
    std::vector<refactoring::RefactoringInstance> instances;
    std::vector<std::string> unmatched;
    std::size_t rm_total = 0;
    std::size_t warnings = 0;
    std::string error;
};

RepoRun mine_repo(const PipelineConfig& cfg, const fs::path& repo) {
    RepoRun run;
    run.project = project_name(repo);
    run.path = repo;
    try {
        history::StreamOptions opts;
        opts.rename_threshold = cfg.rename_threshold;
        metrics::MetricsAccumulator acc(cfg.metrics);
        std::set<std::string> ids;
        history::stream_commits(repo, opts, [&](history::CommitRecord&& c) {
            auto vs = acc.accumulate(c);
            run.vectors.insert(run.vectors.end(), std::make_move_iterator(vs.begin()), std::make_move_iterator(vs.end()));
            ids.insert(c.id);
            json j = history::to_json(c);
            j["project"] = run.project;
            run.commits.push_back(std::move(j));
        });
        run.warnings = acc.warnings().size();

        const fs::path rm = cfg.rm_json_dir / (run.project + ".json");
        if (!fs::exists(rm)) {
            spdlog::warn("{}: no RefactoringMiner output at {}", run.project, rm.string());
            return run;
        }
        auto instances = refactoring::parse_rm_json(rm.string(), run.project);
        run.rm_total = instances.size();
        auto join = refactoring::join_instances(instances, ids);
        std::set<std::string> unmatched(join.unmatched.begin(), join.unmatched.end());
        run.unmatched = join.unmatched;
        for (auto& i : instances)
            if (!unmatched.count(i.id)) run.instances.push_back(std::move(i));
    } catch (const std::exception& e) {
        run.error = e.what();
        run.commits.clear();
        run.vectors.clear();
        run.instances.clear();
    }
    return run;
}

template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) body(i);
    };
    std::vector<std::thread> pool;
    const std::size_t extra = std::min(workers, n) > 1 ? std::min(workers, n) - 1 : 0;
    for (std::size_t t = 0; t < extra; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

std::vector<refactoring::RefactoringInstance> load_instances(const fs::path& path) {
    std::vector<refactoring::RefactoringInstance> out;
    for (const auto& j : util::read_ndjson(path.string())) out.push_back(refactoring::instance_from_json(j));
    return out;
}

// commit id -> (message, project)
std::map<std::string, std::pair<std::string, std::string>> load_commit_index(const fs::path& path) {
    std::map<std::string, std::pair<std::string, std::string>> out;
    for (const auto& j : util::read_ndjson(path.string()))
        out[j.at("id").get<std::string>()] = {j.at("message").get<std::string>(), j.at("project").get<std::string>()};
    return out;
}

std::map<std::pair<std::string, std::string>, llm::GroundTruth> load_ground_truth(const fs::path& path) {
    std::map<std::pair<std::string, std::string>, llm::GroundTruth> out;
    if (path.empty()) return out;
    auto csv = util::read_csv_file(path.string());
    const int c = csv.column("commit"), t = csv.column("type"), m = csv.column("motivation"),
              e = csv.column("explanation");
    if (c < 0 || t < 0 || m < 0) throw MalformedCsv(path.string() + ": header must contain commit,type,motivation");
    for (const auto& row : csv.rows) {
        auto cell = [&](int i) { return i >= 0 && i < static_cast<int>(row.size()) ? row[i] : std::string(); };
        out.try_emplace({cell(c), cell(t)}, llm::GroundTruth{cell(m), cell(e)});
    }
    return out;
}

double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
}

std::string fmt(double v, int decimals = 4) {
    return std::isnan(v) ? std::string("NA") : util::format_fixed(v, decimals);
}

}  // namespace

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void append_run_log(const PipelineConfig& cfg, const std::string& stage, const std::string& started, int exit_code) {
    fs::create_directories(cfg.output_dir);
    std::ofstream out(cfg.output_dir / "run-log.ndjson", std::ios::app);
    out << util::canonical_dump({{"stage", stage}, {"started", started}, {"finished", utc_now()},
                                 {"exit_code", exit_code}, {"tool", kToolVersion}})
        << "\n";
}

const std::vector<std::string>& stage_artifacts(const std::string& stage) {
    static const std::map<std::string, std::vector<std::string>> files = {
        {"mine", {"metrics.csv", "commits.ndjson", "instances.ndjson", "manifest.json"}},
        {"sample", {"manifest.csv", "report.json"}},
        {"classify",
         {"cases.ndjson", "transcripts.ndjson", "consensus.ndjson", "alignment.ndjson", "coding.ndjson",
          "categories.json", "validation_batch.ndjson", "report.json"}},
        {"analyze",
         {"correlation.csv", "normality.csv", "importance.csv", "agreement.json", "summary.json", "summary.txt"}},
    };
    auto it = files.find(stage);
    if (it == files.end()) throw DomainError("unknown stage " + stage);
    return it->second;
}

const std::vector<std::string>& analysis_metric_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& n : metrics::process_metric_names())
            if (n != "ND" && n != "SCTR") out.push_back(n);
        for (const auto& n : metrics::ProductMetrics::numeric_names()) out.push_back(n);
        return out;
    }();
    return names;
}

std::string commit_diff(const fs::path& repo, const std::string& commit, const std::vector<std::string>& paths,
                        int rename_threshold) {
    std::vector<std::string> argv = {"git", "-C", repo.string(), "log", "-1", "-p", "--format=", "--no-color",
                                     "--no-ext-diff", "--diff-merges=first-parent",
                                     "-M" + std::to_string(rename_threshold) + "%", commit, "--"};
    argv.insert(argv.end(), paths.begin(), paths.end());
    auto r = util::run(argv);
    if (r.exit_code != 0) throw IoError("git log -p " + commit + " failed in " + repo.string() + ": " + r.err);
    return r.out;
}

// ---- mine -------------------------------------------------------------------

StageOutcome run_mine(const PipelineConfig& cfg) {
    validate(cfg);
    StageOutcome out;
    const fs::path dir = cfg.stage_dir("mine");
    fs::create_directories(dir);

    std::vector<RepoRun> runs(cfg.repos.size());
    parallel_for(cfg.repos.size(), std::max(1u, std::thread::hardware_concurrency()),
                 [&](std::size_t i) { runs[i] = mine_repo(cfg, cfg.repos[i]); });

    std::set<std::string> projects;
    std::vector<metrics::MetricVector> vectors;
    std::vector<json> commits, instances;
    json repos = json::array();
    for (const auto& r : runs) {
        if (!projects.insert(r.project).second) {
            out.problems.push_back("two repositories share the project name '" + r.project + "'");
            out.exit_code = 1;
        }
        json entry = {{"project", r.project},          {"path", r.path.string()},
                      {"commits", r.commits.size()},   {"metric_vectors", r.vectors.size()},
                      {"refactorings", r.rm_total},    {"joined", r.instances.size()},
                      {"unmatched", r.unmatched},      {"metric_warnings", r.warnings},
                      {"status", r.error.empty() ? "ok" : "failed"}};
        if (!r.error.empty()) {
            entry["error"] = r.error;
            out.problems.push_back(r.project + ": " + r.error);
            out.exit_code = 1;
            spdlog::error("mining {} failed: {}", r.project, r.error);
        }
        repos.push_back(entry);
        vectors.insert(vectors.end(), r.vectors.begin(), r.vectors.end());
        commits.insert(commits.end(), r.commits.begin(), r.commits.end());
        for (const auto& i : r.instances) instances.push_back(refactoring::to_json(i));
    }

    json product = nullptr;
    if (!cfg.product_metrics.empty()) {
        auto rep = metrics::ingest_product_metrics(cfg.product_metrics.string(), vectors, cfg.readability);
        product = {{"joined", rep.joined}, {"unmatched", rep.unmatched}, {"skipped", rep.skipped}};
    }

    std::ostringstream csv;
    metrics::write_metrics_csv(csv, vectors);
    write(out, dir / "metrics.csv", csv.str());
    write(out, dir / "commits.ndjson", util::to_ndjson(commits));
    write(out, dir / "instances.ndjson", util::to_ndjson(instances));
    json manifest = {{"tool", kToolVersion},
                     {"stage", "mine"},
                     {"settings",
                      {{"rename_threshold", cfg.rename_threshold},
                       {"adev_window_days", cfg.metrics.adev_window_days},
                       {"rexp_window_days", cfg.metrics.rexp_window_days},
                       {"fix_keywords", cfg.metrics.fix_keywords},
                       {"comread_low", cfg.readability.low},
                       {"comread_high", cfg.readability.high}}},
                     {"repositories", repos},
                     {"product_metrics", product}};
    write(out, dir / "manifest.json", pretty(manifest));
    return out;
}

// ---- sample -----------------------------------------------------------------

StageOutcome run_sample(const PipelineConfig& cfg) {
    const fs::path in = cfg.stage_dir("mine") / "instances.ndjson";
    require(in, "mine");
    StageOutcome out;
    const fs::path dir = cfg.stage_dir("sample");
    fs::create_directories(dir);

    std::vector<sampler::Candidate> population;
    for (const auto& i : load_instances(in)) population.push_back(sampler::candidate_from(i));
    auto result = sampler::draw_sample(population, cfg.sample);

    std::ostringstream manifest;
    sampler::write_manifest(manifest, result);
    write(out, dir / "manifest.csv", manifest.str());

    std::map<int, std::size_t> per_phase;
    for (const auto& s : result.selections) ++per_phase[s.phase];
    json report = {{"population", result.population.size()},
                   {"target_n", cfg.sample.target_n},
                   {"selected", result.selections.size()},
                   {"seed", cfg.sample.seed},
                   {"min_per_project", cfg.sample.min_per_project},
                   {"min_per_type", cfg.sample.min_per_type},
                   {"phase_counts", {{"1", per_phase[1]}, {"2", per_phase[2]}, {"3", per_phase[3]}}},
                   {"phase2_k", result.phase2_k},
                   {"shortfall", {{"projects", result.shortfall.projects}, {"types", result.shortfall.types}}},
                   {"cochran_n", sampler::cochran_n(cfg.sample.confidence, cfg.sample.margin)},
                   {"cochran_n_finite", sampler::cochran_n(cfg.sample.confidence, cfg.sample.margin,
                                                           result.population.size())}};
    write(out, dir / "report.json", pretty(report));
    return out;
}

// ---- classify ---------------------------------------------------------------

StageOutcome run_classify(const PipelineConfig& cfg, bool mock) {
    const fs::path manifest = cfg.stage_dir("sample") / "manifest.csv";
    const fs::path instances_path = cfg.stage_dir("mine") / "instances.ndjson";
    const fs::path commits_path = cfg.stage_dir("mine") / "commits.ndjson";
    require(manifest, "sample");
    require(instances_path, "mine");
    require(commits_path, "mine");
    StageOutcome out;
    const fs::path dir = cfg.stage_dir("classify");
    fs::create_directories(dir);

    std::map<std::string, refactoring::RefactoringInstance> by_id;
    for (auto& i : load_instances(instances_path)) by_id.emplace(i.id, std::move(i));
    const auto commits = load_commit_index(commits_path);
    std::map<std::string, fs::path> repo_of;
    for (const auto& r : cfg.repos) repo_of[project_name(r)] = r;
    const auto truth = load_ground_truth(cfg.ground_truth);

    std::vector<llm::MotivationCase> cases;
    for (const auto& row : sampler::read_manifest(manifest.string())) {
        auto it = by_id.find(row.id);
        if (it == by_id.end()) throw MissingStageInput("sampled instance " + row.id + " is not in " + instances_path.string());
        const auto& inst = it->second;
        auto c = commits.find(inst.commit_id);
        if (c == commits.end()) throw MissingStageInput("commit " + inst.commit_id + " is not in " + commits_path.string());
        auto repo = repo_of.find(c->second.second);
        if (repo == repo_of.end())
            throw ConfigError("no configured repository for project '" + c->second.second + "'");
        std::set<std::string> paths;
        for (const auto& l : inst.left)
            if (!l.path.empty()) paths.insert(l.path);
        for (const auto& l : inst.right)
            if (!l.path.empty()) paths.insert(l.path);

        llm::MotivationCase mc;
        mc.id = inst.id;
        mc.refactoring_type = std::string(inst.type->name);
        mc.abbreviation = std::string(inst.type->abbreviation);
        mc.description = inst.description;
        mc.commit_id = inst.commit_id;
        mc.commit_message = c->second.first;
        mc.code_diff = commit_diff(repo->second, inst.commit_id, {paths.begin(), paths.end()}, cfg.rename_threshold);
        if (auto gt = truth.find({inst.commit_id, mc.refactoring_type}); gt != truth.end()) mc.ground_truth = gt->second;
        cases.push_back(std::move(mc));
    }
    if (cases.empty()) throw MissingStageInput("the sample manifest is empty");

    std::vector<json> case_lines;
    for (const auto& c : cases) case_lines.push_back(llm::to_json(c));
    write(out, dir / "cases.ndjson", util::to_ndjson(case_lines));

    llm::MockResponder responder;
    llm::MockTransport mock_transport(responder);
    llm::HttpChatTransport http_transport;
    if (mock && !cfg.mock_script.empty())
        llm::install_mock_script(responder, json::parse(util::read_file(cfg.mock_script.string())).at("script"), cases,
                                 cfg.llm);
    llm::ChatTransport& transport = mock ? static_cast<llm::ChatTransport&>(mock_transport) : http_transport;
    llm::TranscriptStore store((dir / "transcripts.ndjson").string());
    llm::Orchestrator orch(cfg.llm, transport, store);

    auto records = orch.extract_all(cases);
    std::vector<json> lines;
    for (const auto& r : records) lines.push_back(llm::to_json(r));
    write(out, dir / "consensus.ndjson", util::to_ndjson(lines));

    lines.clear();
    std::map<std::string, std::size_t> label_counts = {{"yes", 0}, {"no", 0}, {"extends", 0}};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (!cases[i].ground_truth) continue;
        auto label = orch.classify_alignment(cases[i], records[i]);
        ++label_counts[llm::to_string(label.value)];
        json j = llm::to_json(label);
        j["case_id"] = cases[i].id;
        lines.push_back(j);
    }
    write(out, dir / "alignment.ndjson", util::to_ndjson(lines));

    auto coded = orch.open_code(records);
    lines.clear();
    for (const auto& a : coded.assignments) lines.push_back(llm::to_json(a));
    write(out, dir / "coding.ndjson", util::to_ndjson(lines));
    write(out, dir / "categories.json", pretty(llm::to_json(coded.pool)));

    const std::size_t n_validate =
        cfg.validation_sample.value_or(sampler::cochran_n(0.95, 0.05, records.size()));
    write(out, dir / "validation_batch.ndjson",
          llm::export_validation_batch(cases, records, std::min(n_validate, records.size()), cfg.validation_seed));
    if (n_validate > records.size()) {
        out.problems.push_back("validation sample of " + std::to_string(n_validate) + " exceeds the " +
                               std::to_string(records.size()) + " records; all were exported");
        spdlog::warn("{}", out.problems.back());
    }

    std::size_t arbitrated = 0, overridden = 0;
    for (const auto& r : records) {
        arbitrated += r.v3.has_value();
        overridden += r.final_source == llm::Role::V3;
    }
    json report = {{"cases", cases.size()},
                   {"arbitrated", arbitrated},
                   {"final_from_v3", overridden},
                   {"with_ground_truth", label_counts["yes"] + label_counts["no"] + label_counts["extends"]},
                   {"alignment_labels", label_counts},
                   {"categories", coded.pool.size()},
                   {"validation_sample", std::min(n_validate, records.size())},
                   {"transcript_entries", store.size()},
                   {"mock", mock}};
    write(out, dir / "report.json", pretty(report));
    out.artifacts.push_back(dir / "transcripts.ndjson");
    spdlog::info("classify: {} cases, {} network calls", cases.size(), orch.network_calls());
    return out;
}

// ---- analyze ----------------------------------------------------------------

StageOutcome run_analyze(const PipelineConfig& cfg) {
    const fs::path cdir = cfg.stage_dir("classify");
    for (const char* f : {"cases.ndjson", "consensus.ndjson", "coding.ndjson", "categories.json", "alignment.ndjson"})
        require(cdir / f, "classify");
    require(cfg.stage_dir("mine") / "metrics.csv", "mine");
    require(cfg.stage_dir("mine") / "instances.ndjson", "mine");
    StageOutcome out;
    const fs::path dir = cfg.stage_dir("analyze");
    fs::create_directories(dir);

    // Rows: one per coded case with a metric vector for its (commit, file).
    auto vectors = metrics::read_metrics_csv((cfg.stage_dir("mine") / "metrics.csv").string());
    std::map<std::string, const metrics::MetricVector*> vindex;
    for (const auto& v : vectors) vindex.emplace(vkey(v.commit_id, v.file_path), &v);
    std::map<std::string, refactoring::RefactoringInstance> by_id;
    for (auto& i : load_instances(cfg.stage_dir("mine") / "instances.ndjson")) by_id.emplace(i.id, std::move(i));

    std::vector<std::string> rmcs;
    for (const auto& c : json::parse(util::read_file((cdir / "categories.json").string())))
        rmcs.push_back(c.at("name").get<std::string>());

    const auto& names = analysis_metric_names();
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    std::size_t unmapped = 0;
    for (const auto& a : util::read_ndjson((cdir / "coding.ndjson").string())) {
        const auto id = a.at("case_id").get<std::string>();
        auto inst = by_id.find(id);
        const metrics::MetricVector* v = nullptr;
        if (inst != by_id.end()) {
            std::vector<std::string> candidates = {inst->second.primary_path()};
            for (const auto& l : inst->second.left) candidates.push_back(l.path);
            for (const auto& cand : candidates)
                if (auto it = vindex.find(vkey(inst->second.commit_id, cand)); it != vindex.end()) {
                    v = it->second;
                    break;
                }
        }
        if (!v) {
            ++unmapped;
            spdlog::warn("analyze: no metric vector for case {}; row dropped", id);
            continue;
        }
        std::vector<double> row;
        for (const auto& n : names) row.push_back(v->value(n).value_or(std::numeric_limits<double>::quiet_NaN()));
        rows.push_back(std::move(row));
        labels.push_back(a.at("category").get<std::string>());
    }

    // Correlation matrix, pairwise-complete per metric.
    std::vector<stats::NamedColumn> columns;
    for (std::size_t j = 0; j < names.size(); ++j) {
        stats::NamedColumn col{names[j], {}};
        for (const auto& r : rows) col.values.push_back(r[j]);
        columns.push_back(std::move(col));
    }
    json corr_summary = nullptr;
    {
        std::ostringstream csv;
        if (!rows.empty() && !rmcs.empty()) {
            auto m = stats::build_correlation_matrix(labels, rmcs, columns, cfg.analyze.alpha);
            stats::write_correlation_csv(csv, m);
            std::size_t rb = 0, rbh = 0, tb = 0, tbh = 0, degenerate = 0;
            for (const auto& c : m.cells) {
                rb += c.rho_bonf_reject;
                rbh += c.rho_bh_reject;
                tb += c.tau_bonf_reject;
                tbh += c.tau_bh_reject;
                degenerate += c.degenerate;
            }
            corr_summary = {{"rmcs", m.rmcs.size()},
                            {"metrics", m.metrics.size()},
                            {"cells", m.m()},
                            {"bonferroni_threshold", m.bonferroni_threshold},
                            {"degenerate_cells", degenerate},
                            {"rho_rejections", {{"bonferroni", rb}, {"bh", rbh}}},
                            {"tau_rejections", {{"bonferroni", tb}, {"bh", tbh}}}};
        } else {
            util::write_csv_row(csv, {"rmc", "metric", "rho", "tau", "p_raw", "p_bonf_reject", "p_bh", "tau_p_raw",
                                      "tau_p_bonf_reject", "tau_p_bh"});
        }
        write(out, dir / "correlation.csv", csv.str());
    }

    // Normality of each metric over the analysed rows.
    {
        std::ostringstream csv;
        util::write_csv_row(csv, {"metric", "n", "a2", "p_value", "reject_at_alpha"});
        for (const auto& col : columns) {
            std::vector<double> xs;
            for (double x : col.values)
                if (!std::isnan(x)) xs.push_back(x);
            try {
                auto r = stats::anderson_darling_normal(xs);
                util::write_csv_row(csv, {col.name, std::to_string(xs.size()), util::format_double(r.extra.at("a2")),
                                          util::format_double(r.p_value), r.p_value < cfg.analyze.alpha ? "1" : "0"});
            } catch (const Error&) {
                util::write_csv_row(csv, {col.name, std::to_string(xs.size()), "NA", "NA", "NA"});
            }
        }
        write(out, dir / "normality.csv", csv.str());
    }

    // Random forest with median imputation for missing metric values.
    json forest = nullptr;
    {
        std::ostringstream csv;
        util::write_csv_row(csv, {"feature", "mda", "mdg"});
        std::vector<std::string> classes;
        for (const auto& l : labels)
            if (std::find(classes.begin(), classes.end(), l) == classes.end()) classes.push_back(l);
        std::sort(classes.begin(), classes.end());
        if (classes.size() >= 2) {
            stats::Dataset data;
            data.feature_names = names;
            data.class_names = classes;
            std::vector<double> med(names.size());
            for (std::size_t j = 0; j < names.size(); ++j) med[j] = median(columns[j].values);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                auto r = rows[i];
                for (std::size_t j = 0; j < r.size(); ++j)
                    if (std::isnan(r[j])) r[j] = med[j];
                data.rows.push_back(std::move(r));
                data.labels.push_back(static_cast<int>(
                    std::find(classes.begin(), classes.end(), labels[i]) - classes.begin()));
            }
            stats::ForestConfig fc;
            fc.n_trees = cfg.analyze.trees;
            fc.seed = cfg.analyze.seed;
            auto rep = stats::rf_train_and_importance(data, fc);
            for (const auto& fi : rep.importance)
                util::write_csv_row(csv, {fi.feature, util::format_double(fi.mda), util::format_double(fi.mdg)});
            forest = {{"rows", data.rows.size()},
                      {"classes", classes.size()},
                      {"trees", fc.n_trees},
                      {"seed", fc.seed},
                      {"oob_accuracy", rep.oob_accuracy}};
        } else {
            forest = {{"skipped", "fewer than two motivation categories among the analysed rows"}};
        }
        write(out, dir / "importance.csv", csv.str());
    }

    // Agreement: human verdicts when any exist, else the configured table.
    json agreement = {{"source", "none"}};
    const fs::path verdict_log = cfg.stage_dir("review") / "verdicts.ndjson";
    if (fs::exists(verdict_log) && fs::exists(cfg.review.batch)) {
        ReviewOptions opts;
        opts.reviewers = cfg.review.reviewers;
        opts.majority_min = cfg.review.majority_min;
        ReviewStore review(ReviewStore::load_batch(cfg.review.batch), verdict_log, opts);
        agreement = review.agreement();
        agreement["source"] = "verdicts";
    } else if (!cfg.analyze.agreement_table.empty()) {
        agreement = table_report(read_agreement_table(cfg.analyze.agreement_table));
        agreement["source"] = cfg.analyze.agreement_table.filename().string();
    }

    json shares = json::array();
    if (!cfg.analyze.label_counts.empty())
        for (const auto& s : label_shares(read_label_counts(cfg.analyze.label_counts)))
            shares.push_back({{"label", s.label}, {"count", s.count}, {"percent", s.percent}});
    agreement["label_shares"] = shares;

    std::vector<std::pair<std::string, std::int64_t>> llm_labels = {{"yes", 0}, {"no", 0}, {"extends", 0}};
    for (const auto& a : util::read_ndjson((cdir / "alignment.ndjson").string()))
        for (auto& [label, n] : llm_labels)
            if (label == a.at("label").get<std::string>()) ++n;
    json llm_shares = json::array();
    if (llm_labels[0].second + llm_labels[1].second + llm_labels[2].second > 0)
        for (const auto& s : label_shares(llm_labels))
            llm_shares.push_back({{"label", s.label}, {"count", s.count}, {"percent", s.percent}});
    agreement["llm_alignment_shares"] = llm_shares;
    write(out, dir / "agreement.json", pretty(agreement));

    const std::size_t records = util::read_ndjson((cdir / "consensus.ndjson").string()).size();
    json sizes = {{"cochran_infinite", sampler::cochran_n(0.95, 0.05)},
                  {"cochran_for_records", sampler::cochran_n(0.95, 0.05, std::max<std::size_t>(records, 1))},
                  {"cochran_for_758_pairs", sampler::cochran_n(0.95, 0.05, 758)},
                  {"published_validation_sample", 198},
                  {"note", "Cochran at (0.95, 0.05) over 758 pairs gives 255, not the published 198; both are "
                           "reported and neither is adjusted"}};
    json summary = {{"rows", rows.size()},
                    {"rows_without_metrics", unmapped},
                    {"rmcs", rmcs},
                    {"correlation", corr_summary},
                    {"forest", forest},
                    {"sample_sizes", sizes}};
    write(out, dir / "summary.json", pretty(summary));

    // Human-readable digest.
    std::ostringstream txt;
    txt << "Analysed rows: " << rows.size() << " (" << unmapped << " without metrics)\n";
    txt << "Motivation categories: " << rmcs.size() << "\n";
    if (!corr_summary.is_null())
        txt << "Correlation cells: " << corr_summary["cells"].get<std::size_t>() << " (Bonferroni threshold "
            << util::format_double(corr_summary["bonferroni_threshold"].get<double>()) << "; rho rejections "
            << corr_summary["rho_rejections"]["bonferroni"].get<std::size_t>() << " Bonferroni / "
            << corr_summary["rho_rejections"]["bh"].get<std::size_t>() << " BH)\n";
    if (forest.contains("oob_accuracy"))
        txt << "Random forest: " << forest["trees"].get<std::size_t>() << " trees, OOB accuracy "
            << fmt(forest["oob_accuracy"].get<double>()) << "\n";
    else
        txt << "Random forest: skipped (" << forest["skipped"].get<std::string>() << ")\n";
    txt << "Agreement source: " << agreement["source"].get<std::string>() << "\n";
    auto print_table = [&](const json& t, const std::string& title) {
        if (!t.contains("kappa")) return;
        txt << title << ": n = " << t["n"] << "\n";
        if (t["kappa"].is_null()) {
            txt << "  kappa undefined (" << t.value("kappa_undefined", "") << ")\n";
        } else {
            const auto& k = t["kappa"];
            txt << "  kappa " << fmt(k["value"].get<double>(), 3) << ", SE " << fmt(k["std_err"].get<double>(), 3)
                << ", 95% CI [" << fmt(k["ci_low"].get<double>(), 3) << ", " << fmt(k["ci_high"].get<double>(), 3)
                << "], p " << util::format_double(k["p_value"].get<double>()) << "\n";
        }
        if (t.contains("bowker"))
            txt << "  Bowker chi2 " << fmt(t["bowker"]["statistic"].get<double>(), 3) << ", df "
                << t["bowker"]["df"] << ", p " << util::format_double(t["bowker"]["p_value"].get<double>()) << "\n";
        if (t.contains("raw_agreement"))
            txt << "  raw agreement " << t["raw_agreement"]["agreed"] << "/" << t["raw_agreement"]["n"] << " = "
                << fmt(t["raw_agreement"]["percent"].get<double>(), 2) << "%\n";
    };
    if (agreement["source"] == "verdicts")
        print_table(agreement["majority_vs_llm"], "Majority vs LLM");
    else
        print_table(agreement, "LLM vs human");
    for (const auto& s : agreement["label_shares"])
        txt << "  " << s["label"].get<std::string>() << ": " << s["count"] << " (" << fmt(s["percent"].get<double>(), 2)
            << "%)\n";
    txt << "Sample sizes: Cochran " << sizes["cochran_infinite"] << " (infinite), " << sizes["cochran_for_758_pairs"]
        << " for 758 pairs vs published 198\n";
    write(out, dir / "summary.txt", txt.str());
    return out;
}

}  // namespace refwhy::pipeline

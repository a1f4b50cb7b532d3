#include "refwhy/pipeline/config.hpp"

#include "refwhy/util/text.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace refwhy::pipeline {

namespace pt = boost::property_tree;

namespace {

class Reader {
public:
    Reader(const pt::ptree& tree, fs::path base) : tree_(tree), base_(std::move(base)) {}

    std::optional<std::string> str(const std::string& key) const {
        auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '/'));
        if (!v) return std::nullopt;
        return util::trim(*v);
    }

    template <typename T>
    void num(const std::string& key, T& out) const {
        auto v = str(key);
        if (!v || v->empty()) return;
        if constexpr (std::is_floating_point_v<T>) {
            auto d = util::parse_double(*v);
            if (!d) throw ConfigError(key + ": not a number: '" + *v + "'");
            out = static_cast<T>(*d);
        } else {
            auto i = util::parse_int(*v);
            if (!i || (std::is_unsigned_v<T> && *i < 0)) throw ConfigError(key + ": not a valid count: '" + *v + "'");
            out = static_cast<T>(*i);
        }
    }

    void path(const std::string& key, fs::path& out) const {
        auto v = str(key);
        if (!v || v->empty()) return;
        fs::path p(*v);
        out = p.is_absolute() ? p : base_ / p;
        out = out.lexically_normal();
    }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> out;
        if (auto v = str(key))
            for (auto& part : util::split(*v, ','))
                if (auto t = util::trim(part); !t.empty()) out.push_back(t);
        return out;
    }

private:
    const pt::ptree& tree_;
    fs::path base_;
};

}  // namespace

std::string project_name(const fs::path& repo) {
    auto p = repo.lexically_normal();
    if (p.filename().empty()) p = p.parent_path();
    std::string name = p.filename().string();
    if (name.size() > 4 && name.compare(name.size() - 4, 4, ".git") == 0) name.resize(name.size() - 4);
    return name;
}

PipelineConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(e.what());
    }
    PipelineConfig cfg;
    cfg.source = fs::absolute(path);
    Reader r(tree, cfg.source.parent_path());

    for (const auto& repo : r.list("paths/repos")) {
        fs::path p(repo);
        cfg.repos.push_back((p.is_absolute() ? p : cfg.source.parent_path() / p).lexically_normal());
    }
    r.path("paths/rm_json_dir", cfg.rm_json_dir);
    r.path("paths/product_metrics", cfg.product_metrics);
    r.path("paths/ground_truth", cfg.ground_truth);
    cfg.output_dir = cfg.source.parent_path() / "out";
    r.path("paths/output_dir", cfg.output_dir);

    r.num("mine/rename_threshold", cfg.rename_threshold);
    r.num("thresholds/adev_window_days", cfg.metrics.adev_window_days);
    r.num("thresholds/rexp_window_days", cfg.metrics.rexp_window_days);
    r.num("thresholds/comread_low", cfg.readability.low);
    r.num("thresholds/comread_high", cfg.readability.high);
    if (auto kw = r.list("thresholds/fix_keywords"); !kw.empty()) cfg.metrics.fix_keywords = kw;

    r.num("sample/target_n", cfg.sample.target_n);
    r.num("sample/confidence", cfg.sample.confidence);
    r.num("sample/margin", cfg.sample.margin);
    r.num("sample/min_per_project", cfg.sample.min_per_project);
    r.num("sample/min_per_type", cfg.sample.min_per_type);
    r.num("sample/seed", cfg.sample.seed);

    const std::string endpoint = r.str("llm/endpoint").value_or("http://127.0.0.1:1234");
    cfg.llm = llm::default_orchestrator_config(endpoint);
    {
        fs::path prompts;
        r.path("llm/prompt_dir", prompts);
        cfg.llm.prompt_dir = prompts.string();
    }
    r.num("llm/workers", cfg.llm.workers);
    r.num("llm/response_reserve", cfg.llm.response_reserve);
    r.num("llm/bytes_per_token", cfg.llm.bytes_per_token);
    if (auto role = r.str("llm/alignment_role"); role && !role->empty()) {
        try {
            cfg.llm.alignment_role = llm::role_from_string(*role);
        } catch (const DomainError&) {
            throw ConfigError("llm/alignment_role: unknown role '" + *role + "'");
        }
    }
    for (llm::Role role : llm::kAllRoles) {
        const std::string s = util::to_lower(llm::to_string(role));
        auto& m = cfg.llm.roles[role];
        if (auto v = r.str(s + "/endpoint"); v && !v->empty()) m.endpoint = *v;
        if (auto v = r.str(s + "/model"); v && !v->empty()) m.model_name = *v;
        r.num(s + "/temperature", m.temperature);
        r.num(s + "/context_limit", m.context_limit);
        r.num(s + "/timeout", m.timeout_s);
        r.num(s + "/max_retries", m.max_retries);
        r.num(s + "/backoff", m.backoff_s);
        r.num(s + "/max_in_flight", m.max_in_flight);
        if (m.context_limit == 0) throw ConfigError(s + "/context_limit must be positive");
    }
    if (auto v = r.str("classify/validation_sample"); v && !v->empty()) {
        std::size_t n = 0;
        r.num("classify/validation_sample", n);
        cfg.validation_sample = n;
    }
    r.num("classify/validation_seed", cfg.validation_seed);
    r.path("classify/mock_script", cfg.mock_script);

    if (auto v = r.str("review/bind"); v && !v->empty()) cfg.review.bind = *v;
    r.num("review/port", cfg.review.port);
    cfg.review.reviewers = r.list("review/reviewers");
    r.num("review/majority_min", cfg.review.majority_min);
    r.path("review/static_dir", cfg.review.static_dir);
    r.path("review/batch", cfg.review.batch);
    if (cfg.review.batch.empty()) cfg.review.batch = cfg.stage_dir("classify") / "validation_batch.ndjson";

    r.num("analyze/alpha", cfg.analyze.alpha);
    r.num("analyze/trees", cfg.analyze.trees);
    r.num("analyze/seed", cfg.analyze.seed);
    r.path("analyze/agreement_table", cfg.analyze.agreement_table);
    r.path("analyze/label_counts", cfg.analyze.label_counts);
    return cfg;
}

void validate(const PipelineConfig& cfg) {
    if (cfg.repos.empty()) throw ConfigError("paths/repos: at least one repository is required");
    for (const auto& repo : cfg.repos)
        if (!fs::is_directory(repo)) throw ConfigError("paths/repos: not a directory: " + repo.string());
    if (cfg.rm_json_dir.empty() || !fs::is_directory(cfg.rm_json_dir))
        throw ConfigError("paths/rm_json_dir: not a directory: " + cfg.rm_json_dir.string());
    auto optional_file = [](const char* key, const fs::path& p) {
        if (!p.empty() && !fs::is_regular_file(p)) throw ConfigError(std::string(key) + ": file not found: " + p.string());
    };
    optional_file("paths/product_metrics", cfg.product_metrics);
    optional_file("paths/ground_truth", cfg.ground_truth);
    optional_file("classify/mock_script", cfg.mock_script);
    optional_file("analyze/agreement_table", cfg.analyze.agreement_table);
    optional_file("analyze/label_counts", cfg.analyze.label_counts);
    if (!cfg.llm.prompt_dir.empty() && !fs::is_directory(cfg.llm.prompt_dir))
        throw ConfigError("llm/prompt_dir: not a directory: " + cfg.llm.prompt_dir);
    if (cfg.llm.roles.size() != 4) throw ConfigError("exactly four model roles are required");
    if (!(cfg.readability.low < cfg.readability.high))
        throw ConfigError("thresholds: comread_low must be below comread_high");
    if (!(cfg.analyze.alpha > 0 && cfg.analyze.alpha < 1)) throw ConfigError("analyze/alpha must be in (0, 1)");
    if (cfg.review.port < 0 || cfg.review.port > 65535) throw ConfigError("review/port out of range");
    try {
        cfg.sample.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("sample: ") + e.what());
    }
}

}  // namespace refwhy::pipeline

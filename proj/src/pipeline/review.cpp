#include "refwhy/pipeline/review.hpp"

#include "refwhy/pipeline/report.hpp"
#include "refwhy/util/ndjson.hpp"
#include "refwhy/util/text.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <unistd.h>

namespace refwhy::pipeline {

using nlohmann::json;

namespace {

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(ms));
    return out;
}

const std::vector<std::string> kDecisionLabels = {"agree", "disagree"};

stats::ContingencyTable decision_table(const std::vector<std::pair<llm::Decision, llm::Decision>>& pairs) {
    std::vector<std::pair<std::string, std::string>> labelled;
    for (auto [a, b] : pairs) labelled.emplace_back(llm::to_string(a), llm::to_string(b));
    return stats::ContingencyTable::from_pairs(kDecisionLabels, labelled);
}

json pair_report(const std::vector<std::pair<llm::Decision, llm::Decision>>& pairs) {
    if (pairs.empty()) return {{"n", 0}, {"kappa", nullptr}, {"kappa_undefined", "no shared cases"}};
    return table_report(decision_table(pairs));
}

}  // namespace

json to_json(const ReviewVerdict& v) {
    json models = json::array();
    for (auto r : v.correct_models) models.push_back(llm::to_string(r));
    return {{"case_id", v.case_id},   {"reviewer", v.reviewer}, {"decision", llm::to_string(v.decision)},
            {"correct_models", models}, {"note", v.note},       {"timestamp", v.timestamp}};
}

ReviewVerdict verdict_from_json(const json& j) {
    if (!j.is_object()) throw BadVerdict("verdict must be a JSON object");
    auto text = [&](const char* key, bool required) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) {
            if (required) throw BadVerdict(std::string("missing field '") + key + "'");
            return {};
        }
        if (!it->is_string()) throw BadVerdict(std::string("field '") + key + "' must be a string");
        return it->get<std::string>();
    };
    ReviewVerdict v;
    v.case_id = text("case_id", true);
    v.reviewer = util::trim(text("reviewer", false));
    try {
        v.decision = llm::decision_from_string(text("decision", true));
    } catch (const DomainError&) {
        throw BadVerdict("decision must be 'agree' or 'disagree'");
    }
    if (auto it = j.find("correct_models"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw BadVerdict("correct_models must be an array");
        for (const auto& m : *it) {
            if (!m.is_string()) throw BadVerdict("correct_models entries must be strings");
            try {
                v.correct_models.insert(llm::role_from_string(m.get<std::string>()));
            } catch (const DomainError&) {
                throw BadVerdict("unknown model '" + m.get<std::string>() + "' in correct_models");
            }
        }
    }
    v.note = text("note", false);
    v.timestamp = text("timestamp", false);
    return v;
}

ReviewStore::ReviewStore(std::vector<json> batch, const std::filesystem::path& verdict_log, ReviewOptions options)
    : batch_(std::move(batch)), options_(std::move(options)), log_path_(verdict_log) {
    if (options_.majority_min == 0) throw DomainError("majority_min must be positive");
    for (std::size_t i = 0; i < batch_.size(); ++i) {
        std::string id;
        try {
            id = batch_[i].at("case").at("id").get<std::string>();
            llm_decision_[id] = llm::decision_from_string(batch_[i].at("llm_decision").get<std::string>());
        } catch (const json::exception& e) {
            throw MalformedJson("validation batch line " + std::to_string(i + 1) + ": " + e.what());
        }
        if (!index_.emplace(id, i).second) throw DomainError("duplicate case in validation batch: " + id);
    }
    if (log_path_.empty()) return;
    if (std::filesystem::exists(log_path_)) {
        std::ifstream in(log_path_, std::ios::binary);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                auto v = verdict_from_json(json::parse(line));
                if (!index_.count(v.case_id)) {
                    spdlog::warn("{}:{}: verdict for case {} not in the batch; ignored", log_path_.string(), lineno, v.case_id);
                    continue;
                }
                apply(v);
            } catch (const std::exception& e) {
                spdlog::warn("{}:{}: unreadable verdict line skipped ({})", log_path_.string(), lineno, e.what());
            }
        }
    } else if (log_path_.has_parent_path()) {
        std::filesystem::create_directories(log_path_.parent_path());
    }
    log_ = std::fopen(log_path_.c_str(), "ab");
    if (!log_) throw IoError("cannot open verdict log " + log_path_.string());
}

ReviewStore::~ReviewStore() {
    if (log_) std::fclose(log_);
}

std::vector<json> ReviewStore::load_batch(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("validation batch not found: " + path.string());
    return util::read_ndjson(path.string());
}

bool ReviewStore::has_case(const std::string& id) const { return index_.count(id) > 0; }

void ReviewStore::apply(const ReviewVerdict& v) {
    latest_[v.case_id][v.reviewer] = v;
    ++history_;
}

json ReviewStore::view(std::size_t index, const std::string& reviewer) const {
    json out = batch_[index];
    const auto& id = out["case"]["id"].get<std::string>();
    out["my_verdict"] = nullptr;
    if (auto c = latest_.find(id); c != latest_.end())
        if (auto r = c->second.find(reviewer); r != c->second.end()) out["my_verdict"] = to_json(r->second);
    return out;
}

std::optional<json> ReviewStore::next_case(const std::string& reviewer) const {
    std::lock_guard lock(mu_);
    std::optional<std::size_t> best;
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < batch_.size(); ++i) {
        const auto& id = batch_[i]["case"]["id"].get<std::string>();
        std::size_t count = 0;
        if (auto c = latest_.find(id); c != latest_.end()) {
            if (c->second.count(reviewer)) continue;
            count = c->second.size();
        }
        if (!best || count < best_count) {
            best = i;
            best_count = count;
        }
    }
    if (!best) return std::nullopt;
    return view(*best, reviewer);
}

std::optional<json> ReviewStore::case_view(const std::string& id, const std::string& reviewer) const {
    std::lock_guard lock(mu_);
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return view(it->second, reviewer);
}

ReviewVerdict ReviewStore::submit(ReviewVerdict v) {
    if (v.reviewer.empty()) throw BadVerdict("missing reviewer id");
    if (!options_.reviewers.empty() &&
        std::find(options_.reviewers.begin(), options_.reviewers.end(), v.reviewer) == options_.reviewers.end())
        throw BadVerdict("reviewer '" + v.reviewer + "' is not on the reviewer list");
    if (!index_.count(v.case_id)) throw UnknownCase("no case '" + v.case_id + "' in the validation batch");
    if (v.timestamp.empty()) v.timestamp = now_iso8601();
    std::lock_guard lock(mu_);
    if (log_) {
        const std::string line = util::canonical_dump(to_json(v)) + "\n";
        if (std::fwrite(line.data(), 1, line.size(), log_) != line.size() || std::fflush(log_) != 0)
            throw IoError("cannot append to verdict log " + log_path_.string());
        ::fsync(::fileno(log_));
    }
    apply(v);
    return v;
}

std::map<std::string, ReviewVerdict> ReviewStore::verdicts_for(const std::string& case_id) const {
    std::lock_guard lock(mu_);
    auto it = latest_.find(case_id);
    return it == latest_.end() ? std::map<std::string, ReviewVerdict>{} : it->second;
}

std::size_t ReviewStore::history_size() const {
    std::lock_guard lock(mu_);
    return history_;
}

std::map<std::string, llm::Decision> ReviewStore::majority_locked() const {
    std::map<std::string, llm::Decision> out;
    for (const auto& [id, by_reviewer] : latest_) {
        if (by_reviewer.size() < options_.majority_min) continue;
        std::size_t agree = 0;
        for (const auto& [r, v] : by_reviewer) agree += v.decision == llm::Decision::agree;
        const std::size_t disagree = by_reviewer.size() - agree;
        if (agree != disagree) out[id] = agree > disagree ? llm::Decision::agree : llm::Decision::disagree;
    }
    return out;
}

std::map<std::string, llm::Decision> ReviewStore::majority() const {
    std::lock_guard lock(mu_);
    return majority_locked();
}

std::map<std::string, llm::Decision> ReviewStore::llm_decisions() const { return llm_decision_; }

json ReviewStore::agreement() const {
    std::lock_guard lock(mu_);
    std::set<std::string> reviewers;
    for (const auto& [id, by] : latest_)
        for (const auto& [r, v] : by) reviewers.insert(r);

    json pairs = json::array();
    for (auto a = reviewers.begin(); a != reviewers.end(); ++a)
        for (auto b = std::next(a); b != reviewers.end(); ++b) {
            std::vector<std::pair<llm::Decision, llm::Decision>> shared;
            for (const auto& [id, by] : latest_) {
                auto va = by.find(*a), vb = by.find(*b);
                if (va != by.end() && vb != by.end()) shared.emplace_back(va->second.decision, vb->second.decision);
            }
            json j = pair_report(shared);
            j["rater_a"] = *a;
            j["rater_b"] = *b;
            pairs.push_back(j);
        }

    // Rows are the LLM decision, columns the human one.
    json vs_llm = json::array();
    for (const auto& r : reviewers) {
        std::vector<std::pair<llm::Decision, llm::Decision>> shared;
        for (const auto& [id, by] : latest_)
            if (auto v = by.find(r); v != by.end()) shared.emplace_back(llm_decision_.at(id), v->second.decision);
        json j = pair_report(shared);
        j["reviewer"] = r;
        vs_llm.push_back(j);
    }
    std::vector<std::pair<llm::Decision, llm::Decision>> resolved;
    for (const auto& [id, d] : majority_locked()) resolved.emplace_back(llm_decision_.at(id), d);
    json majority = pair_report(resolved);

    return {{"labels", kDecisionLabels},
            {"reviewer_pairs", pairs},
            {"reviewer_vs_llm", vs_llm},
            {"majority_vs_llm", majority},
            {"majority_min", options_.majority_min}};
}

json ReviewStore::progress() const {
    std::lock_guard lock(mu_);
    std::map<std::string, std::size_t> per_reviewer;
    std::size_t touched = 0, complete = 0, needs_more = 0;
    json flagged = json::array();
    for (const auto& item : batch_) {
        const auto& id = item["case"]["id"].get<std::string>();
        auto it = latest_.find(id);
        const std::size_t n = it == latest_.end() ? 0 : it->second.size();
        if (n > 0) ++touched;
        if (n >= options_.majority_min) ++complete;
        if (n > 0 && n < options_.majority_min) ++needs_more;
        if (it != latest_.end()) {
            std::set<llm::Decision> seen;
            for (const auto& [r, v] : it->second) {
                ++per_reviewer[r];
                seen.insert(v.decision);
            }
            // Split human opinion: another reviewer is needed to break it.
            if (n < options_.majority_min && seen.size() > 1) flagged.push_back(id);
        }
    }
    return {{"total_cases", batch_.size()},
            {"reviewed_cases", touched},
            {"complete_cases", complete},
            {"awaiting_reviewers", needs_more},
            {"resolved_majorities", majority_locked().size()},
            {"needs_tiebreak", flagged},
            {"per_reviewer", per_reviewer},
            {"verdicts_logged", history_}};
}

ReviewService::ReviewService(ReviewStore& store, std::filesystem::path static_dir)
    : store_(store), server_(std::make_unique<httplib::Server>()) {
    auto& srv = *server_;
    auto send_json = [](httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    };
    auto reviewer_of = [](const httplib::Request& req) {
        std::string r = req.get_param_value("reviewer");
        if (r.empty()) r = req.get_header_value("X-Reviewer-Id");
        return util::trim(r);
    };

    srv.Get("/api/cases", [=, this](const httplib::Request& req, httplib::Response& res) {
        const std::string reviewer = reviewer_of(req);
        if (reviewer.empty()) return send_json(res, 400, {{"error", "reviewer query parameter is required"}});
        auto next = store_.next_case(reviewer);
        send_json(res, 200, {{"case", next ? *next : json(nullptr)}, {"done", !next.has_value()}});
    });
    srv.Get(R"(/api/cases/(.+))", [=, this](const httplib::Request& req, httplib::Response& res) {
        auto view = store_.case_view(req.matches[1].str(), reviewer_of(req));
        if (!view) return send_json(res, 404, {{"error", "unknown case"}});
        send_json(res, 200, *view);
    });
    srv.Post("/api/verdicts", [=, this](const httplib::Request& req, httplib::Response& res) {
        ReviewVerdict v;
        try {
            v = verdict_from_json(json::parse(req.body));
            if (v.reviewer.empty()) v.reviewer = reviewer_of(req);
            v = store_.submit(v);
        } catch (const json::parse_error& e) {
            return send_json(res, 400, {{"error", std::string("body is not JSON: ") + e.what()}});
        } catch (const BadVerdict& e) {
            return send_json(res, 400, {{"error", e.what()}});
        } catch (const UnknownCase& e) {
            return send_json(res, 404, {{"error", e.what()}});
        }
        json body = {{"verdict", to_json(v)}};
        auto m = store_.majority();
        auto it = m.find(v.case_id);
        body["majority"] = it == m.end() ? json(nullptr) : json(llm::to_string(it->second));
        send_json(res, 201, body);
    });
    srv.Get("/api/agreement", [=, this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, store_.agreement());
    });
    srv.Get("/api/progress", [=, this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, store_.progress());
    });
    if (!static_dir.empty()) {
        if (!srv.set_mount_point("/", static_dir.string()))
            throw IoError("static directory not found: " + static_dir.string());
    } else {
        srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("refwhy review service: the API lives under /api/\n", "text/plain");
        });
    }
    srv.set_exception_handler([=](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        spdlog::error("review service: {}", what);
        send_json(res, 500, {{"error", what}});
    });
}

ReviewService::~ReviewService() { stop(); }

int ReviewService::start(const std::string& bind, int port) {
    if (port == 0) {
        port_ = server_->bind_to_any_port(bind);
    } else {
        port_ = server_->bind_to_port(bind, port) ? port : -1;
    }
    if (port_ <= 0) throw IoError("cannot bind review service to " + bind + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void ReviewService::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace refwhy::pipeline

#pragma once

#include "refwhy/error.hpp"
#include "refwhy/llm/types.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace refwhy::pipeline {

REFWHY_DEFINE_ERROR(UnknownCase);
REFWHY_DEFINE_ERROR(BadVerdict);

struct ReviewVerdict {
    std::string case_id;
    std::string reviewer;
    llm::Decision decision = llm::Decision::agree;
    std::set<llm::Role> correct_models;
    std::string note;
    std::string timestamp;  // ISO-8601 UTC; assigned on receipt when absent
};

nlohmann::json to_json(const ReviewVerdict& v);
// Throws BadVerdict naming the offending field.
ReviewVerdict verdict_from_json(const nlohmann::json& j);

struct ReviewOptions {
    std::vector<std::string> reviewers;  // empty = any id accepted
    std::size_t majority_min = 3;
};

// Validation batch plus the durable verdict log. Every submit is appended
// and fsync'ed before it is applied; the latest verdict per (case,
// reviewer) wins and the full history stays in the log.
class ReviewStore {
public:
    // `batch` lines are export_validation_batch items. Empty log path =
    // memory only.
    ReviewStore(std::vector<nlohmann::json> batch, const std::filesystem::path& verdict_log,
                ReviewOptions options = {});
    ~ReviewStore();
    ReviewStore(const ReviewStore&) = delete;
    ReviewStore& operator=(const ReviewStore&) = delete;

    static std::vector<nlohmann::json> load_batch(const std::filesystem::path& path);

    bool has_case(const std::string& id) const;
    // The case this reviewer should see next: not yet reviewed by them,
    // fewest verdicts first (cases short of a majority before the rest),
    // then batch order. nullopt when they have reviewed everything.
    std::optional<nlohmann::json> next_case(const std::string& reviewer) const;
    std::optional<nlohmann::json> case_view(const std::string& id, const std::string& reviewer) const;

    // Throws UnknownCase or BadVerdict.
    ReviewVerdict submit(ReviewVerdict v);

    // Latest verdict per reviewer for a case.
    std::map<std::string, ReviewVerdict> verdicts_for(const std::string& case_id) const;
    std::size_t history_size() const;

    // Majority human decision for cases with at least majority_min
    // reviewers and a strict majority.
    std::map<std::string, llm::Decision> majority() const;
    std::map<std::string, llm::Decision> llm_decisions() const;

    nlohmann::json agreement() const;
    nlohmann::json progress() const;

private:
    nlohmann::json view(std::size_t index, const std::string& reviewer) const;
    void apply(const ReviewVerdict& v);
    std::map<std::string, llm::Decision> majority_locked() const;

    std::vector<nlohmann::json> batch_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, llm::Decision> llm_decision_;
    ReviewOptions options_;
    std::filesystem::path log_path_;
    std::FILE* log_ = nullptr;
    mutable std::mutex mu_;
    std::map<std::string, std::map<std::string, ReviewVerdict>> latest_;  // case -> reviewer -> verdict
    std::size_t history_ = 0;
};

// HTTP front end: /api/cases, /api/cases/<id>, /api/verdicts,
// /api/agreement, /api/progress, and static files under /.
class ReviewService {
public:
    ReviewService(ReviewStore& store, std::filesystem::path static_dir = {});
    ~ReviewService();
    ReviewService(const ReviewService&) = delete;
    ReviewService& operator=(const ReviewService&) = delete;

    // port 0 picks a free port. Returns the bound port.
    int start(const std::string& bind, int port);
    void stop();
    int port() const { return port_; }

private:
    ReviewStore& store_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace refwhy::pipeline

#include "refwhy/llm/orchestrator.hpp"

#include "refwhy/util/ndjson.hpp"
#include "refwhy/util/rng.hpp"
#include "refwhy/util/text.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <future>
#include <mutex>
#include <thread>

namespace refwhy::llm {

using nlohmann::json;

namespace {

constexpr Task kAllTasks[] = {Task::motivation, Task::validation,  Task::arbitration,
                              Task::alignment,  Task::coding,      Task::coding_resolution};

void append_entries(std::vector<json>& out, const Exchange& ex) {
    for (const auto& e : ex.entries)
        out.push_back({{"role", e.at("role")},
                       {"task", e.at("task")},
                       {"attempt", e.at("attempt")},
                       {"request", e.at("request")},
                       {"response", e.at("response")}});
}

std::map<std::string, std::string> lrm_vars(const MotivationCase& c, const LrmOutput& lrm) {
    auto vars = case_vars(c);
    vars["lrm_motivation"] = lrm.motivation;
    vars["lrm_description"] = lrm.description;
    vars["lrm_reasoning"] = lrm.reasoning;
    return vars;
}

Verdict verdict_from(const json& parsed) {
    Verdict v;
    v.decision = decision_from_string(parsed.at("decision").get<std::string>());
    v.reasoning = parsed.at("reasoning").get<std::string>();
    if (parsed.contains("motivation")) v.motivation = parsed.at("motivation").get<std::string>();
    return v;
}

}  // namespace

OrchestratorConfig default_orchestrator_config(const std::string& endpoint) {
    OrchestratorConfig cfg;
    const std::pair<Role, std::size_t> limits[] = {
        {Role::LRM, 4096}, {Role::V1, 4096}, {Role::V2, 8129}, {Role::V3, 8129}};
    for (auto [role, limit] : limits) {
        ModelRole m;
        m.role = role;
        m.endpoint = endpoint;
        m.model_name = std::string("model-") + util::to_lower(to_string(role));
        m.context_limit = limit;
        cfg.roles[role] = m;
    }
    return cfg;
}

Orchestrator::Orchestrator(OrchestratorConfig cfg, ChatTransport& transport, TranscriptStore& store)
    : cfg_(std::move(cfg)) {
    for (Role r : kAllRoles)
        if (!cfg_.roles.count(r)) throw DomainError(std::string("no configuration for role ") + to_string(r));
    for (const auto& [role, m] : cfg_.roles)
        if (m.role != role) throw DomainError(std::string("role mismatch in configuration for ") + to_string(role));
    for (Task t : kAllTasks) templates_[t] = load_template(t, cfg_.prompt_dir);

    // One limiter per endpoint, sized by the tightest role using it.
    std::map<std::string, std::size_t> per_endpoint;
    for (const auto& [role, m] : cfg_.roles) {
        auto [it, fresh] = per_endpoint.emplace(m.endpoint, m.max_in_flight);
        if (!fresh) it->second = std::min(it->second, m.max_in_flight);
    }
    std::map<std::string, std::shared_ptr<ChatClient::Limiter>> limiters;
    for (const auto& [endpoint, n] : per_endpoint) limiters[endpoint] = make_limiter(n);
    for (const auto& [role, m] : cfg_.roles)
        clients_[role] = std::make_unique<ChatClient>(m, transport, store, limiters.at(m.endpoint));
}

Prompt Orchestrator::prompt_for(Role role, Task task, const std::map<std::string, std::string>& vars) const {
    Budget b;
    b.context_limit = cfg_.roles.at(role).context_limit;
    b.response_reserve = cfg_.response_reserve;
    b.bytes_per_token = cfg_.bytes_per_token;
    return build_prompt(task, templates_.at(task), vars, b);
}

ConsensusRecord Orchestrator::extract_motivation(const MotivationCase& c) {
    ConsensusRecord rec;
    rec.case_id = c.id;

    auto lrm_ex = clients_.at(Role::LRM)->complete(c.id, prompt_for(Role::LRM, Task::motivation, case_vars(c)));
    append_entries(rec.raw_transcripts, lrm_ex);
    rec.lrm.motivation = lrm_ex.parsed.at("motivation").get<std::string>();
    rec.lrm.description = lrm_ex.parsed.at("description").get<std::string>();
    rec.lrm.reasoning = lrm_ex.parsed.at("reasoning").get<std::string>();

    const auto vars = lrm_vars(c, rec.lrm);
    auto validate = [&](Role role) { return clients_.at(role)->complete(c.id, prompt_for(role, Task::validation, vars)); };
    auto v2_future = std::async(std::launch::async, validate, Role::V2);
    Exchange v1_ex;
    try {
        v1_ex = validate(Role::V1);
    } catch (...) {
        v2_future.wait();
        throw;
    }
    Exchange v2_ex = v2_future.get();
    append_entries(rec.raw_transcripts, v1_ex);
    append_entries(rec.raw_transcripts, v2_ex);
    rec.v1 = verdict_from(v1_ex.parsed);
    rec.v2 = verdict_from(v2_ex.parsed);

    rec.final_source = Role::LRM;
    rec.final_motivation = rec.lrm.motivation;
    if (rec.v1.decision != rec.v2.decision) {
        auto avars = vars;
        avars["v1_decision"] = to_string(rec.v1.decision);
        avars["v1_reasoning"] = rec.v1.reasoning;
        avars["v2_decision"] = to_string(rec.v2.decision);
        avars["v2_reasoning"] = rec.v2.reasoning;
        auto v3_ex = clients_.at(Role::V3)->complete(c.id, prompt_for(Role::V3, Task::arbitration, avars));
        append_entries(rec.raw_transcripts, v3_ex);
        Verdict v3 = verdict_from(v3_ex.parsed);
        if (v3.decision == Decision::disagree) {
            if (util::trim(v3.motivation).empty())
                throw MalformedModelOutput("V3 for " + c.id + " disagreed without a corrected motivation");
            rec.final_source = Role::V3;
            rec.final_motivation = v3.motivation;
        } else {
            v3.motivation.clear();
        }
        rec.v3 = std::move(v3);
    }
    return rec;
}

std::vector<ConsensusRecord> Orchestrator::extract_all(const std::vector<MotivationCase>& cases) {
    std::vector<ConsensusRecord> out(cases.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            if (failed) return;
            const std::size_t i = next++;
            if (i >= cases.size()) return;
            try {
                out[i] = extract_motivation(cases[i]);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    const std::size_t n = std::clamp<std::size_t>(cfg_.workers, 1, std::max<std::size_t>(cases.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

AlignmentLabel Orchestrator::classify_alignment(const MotivationCase& c, const ConsensusRecord& r) {
    if (!c.ground_truth) throw DomainError("case " + c.id + " has no ground truth to align against");
    auto vars = case_vars(c);
    vars["motivation"] = r.final_motivation;
    vars["gt_motivation"] = c.ground_truth->motivation;
    vars["gt_explanation"] = c.ground_truth->explanation;
    const Role role = cfg_.alignment_role;
    auto ex = clients_.at(role)->complete(c.id, prompt_for(role, Task::alignment, vars));
    AlignmentLabel label;
    label.value = alignment_from_string(ex.parsed.at("label").get<std::string>());
    label.reasoning = ex.parsed.at("reasoning").get<std::string>();
    return label;
}

CodingAssignment Orchestrator::code_one(const ConsensusRecord& r, CategoryPool& pool) {
    CodingAssignment a;
    a.case_id = r.case_id;
    std::map<std::string, std::string> vars = {
        {"motivation", r.final_motivation},
        {"motivation_description", r.final_source == Role::LRM ? r.lrm.description : r.v3->reasoning},
        {"pool", format_pool(pool)}};

    auto code = [&](Role role) { return clients_.at(role)->complete(r.case_id, prompt_for(role, Task::coding, vars)); };
    auto v2_future = std::async(std::launch::async, code, Role::V2);
    Exchange v1_ex;
    try {
        v1_ex = code(Role::V1);
    } catch (...) {
        v2_future.wait();
        throw;
    }
    Exchange v2_ex = v2_future.get();
    append_entries(a.raw_transcripts, v1_ex);
    append_entries(a.raw_transcripts, v2_ex);
    a.v1_category = util::trim(v1_ex.parsed.at("category").get<std::string>());
    a.v2_category = util::trim(v2_ex.parsed.at("category").get<std::string>());
    if (a.v1_category.empty() || a.v2_category.empty())
        throw MalformedModelOutput("empty category proposed for " + r.case_id);

    Category chosen;
    chosen.created_by = r.case_id;
    if (util::to_lower(a.v1_category) == util::to_lower(a.v2_category)) {
        a.v3_decision = "shared";
        chosen.name = a.v1_category;
        chosen.description = v1_ex.parsed.at("description").get<std::string>();
        a.reasoning = v1_ex.parsed.at("reasoning").get<std::string>();
    } else {
        auto rvars = vars;
        rvars["v1_category"] = a.v1_category;
        rvars["v1_reasoning"] = v1_ex.parsed.at("reasoning").get<std::string>();
        rvars["v2_category"] = a.v2_category;
        rvars["v2_reasoning"] = v2_ex.parsed.at("reasoning").get<std::string>();
        auto v3_ex = clients_.at(Role::V3)->complete(r.case_id, prompt_for(Role::V3, Task::coding_resolution, rvars));
        append_entries(a.raw_transcripts, v3_ex);
        const std::string decision = v3_ex.parsed.at("decision").get<std::string>();
        a.v3_decision = decision;
        a.reasoning = v3_ex.parsed.at("reasoning").get<std::string>();
        if (decision == "v1") {
            chosen.name = a.v1_category;
            chosen.description = v1_ex.parsed.at("description").get<std::string>();
        } else if (decision == "v2") {
            chosen.name = a.v2_category;
            chosen.description = v2_ex.parsed.at("description").get<std::string>();
        } else {
            chosen.name = util::trim(v3_ex.parsed.at("category").get<std::string>());
            chosen.description = v3_ex.parsed.at("description").get<std::string>();
            if (chosen.name.empty())
                throw MalformedModelOutput("V3 proposed an empty new category for " + r.case_id);
        }
    }
    // An existing name keeps its original spelling and description.
    a.category = pool.add(std::move(chosen)).name;
    return a;
}

CodingResult Orchestrator::open_code(const std::vector<ConsensusRecord>& records, CategoryPool pool) {
    if (records.empty()) throw DomainError("open coding needs at least one record");
    CodingResult out;
    for (const auto& r : records) out.assignments.push_back(code_one(r, pool));
    out.pool = std::move(pool);
    return out;
}

std::size_t Orchestrator::network_calls() const {
    std::size_t n = 0;
    for (const auto& [role, c] : clients_) n += c->network_calls();
    return n;
}

std::size_t Orchestrator::network_calls(Role role) const { return clients_.at(role)->network_calls(); }

json review_item(const MotivationCase& c, const ConsensusRecord& r) {
    json rec = to_json(r);
    rec.erase("raw_transcripts");
    return {{"case", to_json(c)}, {"record", rec}, {"llm_decision", to_string(r.llm_decision())}};
}

std::string export_validation_batch(const std::vector<MotivationCase>& cases,
                                    const std::vector<ConsensusRecord>& records, std::size_t sample_n,
                                    std::uint64_t seed) {
    std::map<std::string, const MotivationCase*> by_id;
    for (const auto& c : cases) by_id[c.id] = &c;
    std::vector<const ConsensusRecord*> pool;
    for (const auto& r : records) {
        if (!by_id.count(r.case_id)) {
            spdlog::warn("record {} has no matching case; not exported", r.case_id);
            continue;
        }
        pool.push_back(&r);
    }
    if (sample_n > pool.size())
        throw InsufficientRecords("asked for " + std::to_string(sample_n) + " records but only " +
                                  std::to_string(pool.size()) + " are available");
    std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->case_id < b->case_id; });
    for (std::size_t i = 1; i < pool.size(); ++i)
        if (pool[i]->case_id == pool[i - 1]->case_id)
            throw DomainError("duplicate record for case " + pool[i]->case_id);

    // Partial Fisher-Yates over positions, then restore id order.
    util::Rng rng(seed);
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < sample_n; ++i)
        std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.uniform_index(idx.size() - i))]);
    idx.resize(sample_n);
    std::sort(idx.begin(), idx.end());

    std::vector<json> lines;
    for (auto i : idx) lines.push_back(review_item(*by_id.at(pool[i]->case_id), *pool[i]));
    return util::to_ndjson(lines);
}

}  // namespace refwhy::llm

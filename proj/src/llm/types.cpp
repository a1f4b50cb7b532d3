#include "refwhy/llm/types.hpp"

#include "refwhy/util/text.hpp"

namespace refwhy::llm {

using nlohmann::json;

const char* to_string(Role r) {
    switch (r) {
        case Role::LRM: return "LRM";
        case Role::V1: return "V1";
        case Role::V2: return "V2";
        case Role::V3: return "V3";
    }
    return "?";
}

Role role_from_string(const std::string& s) {
    for (auto r : kAllRoles)
        if (s == to_string(r)) return r;
    throw DomainError("unknown model role '" + s + "'");
}

const char* to_string(Decision d) { return d == Decision::agree ? "agree" : "disagree"; }

Decision decision_from_string(const std::string& s) {
    if (s == "agree") return Decision::agree;
    if (s == "disagree") return Decision::disagree;
    throw DomainError("unknown decision '" + s + "'");
}

const char* to_string(Alignment a) {
    switch (a) {
        case Alignment::yes: return "yes";
        case Alignment::no: return "no";
        case Alignment::extends: return "extends";
    }
    return "?";
}

Alignment alignment_from_string(const std::string& s) {
    if (s == "yes") return Alignment::yes;
    if (s == "no") return Alignment::no;
    if (s == "extends") return Alignment::extends;
    throw DomainError("unknown alignment label '" + s + "'");
}

const Category* CategoryPool::find(const std::string& name) const {
    const auto key = util::to_lower(util::trim(name));
    for (const auto& c : items_)
        if (util::to_lower(util::trim(c.name)) == key) return &c;
    return nullptr;
}

const Category& CategoryPool::add(Category c) {
    if (auto existing = find(c.name)) return *existing;
    c.name = util::trim(c.name);
    items_.push_back(std::move(c));
    return items_.back();
}

namespace {

json verdict_json(const Verdict& v, bool with_motivation) {
    json j = {{"decision", to_string(v.decision)}, {"reasoning", v.reasoning}};
    if (with_motivation) j["motivation"] = v.motivation;
    return j;
}

Verdict verdict_from(const json& j) {
    Verdict v;
    v.decision = decision_from_string(j.at("decision").get<std::string>());
    v.reasoning = j.at("reasoning").get<std::string>();
    v.motivation = j.value("motivation", "");
    return v;
}

}  // namespace

json to_json(const MotivationCase& c) {
    json j = {{"id", c.id},
              {"refactoring_type", c.refactoring_type},
              {"abbreviation", c.abbreviation},
              {"description", c.description},
              {"commit", c.commit_id},
              {"commit_message", c.commit_message},
              {"code_diff", c.code_diff},
              {"ground_truth", nullptr}};
    if (c.ground_truth)
        j["ground_truth"] = {{"motivation", c.ground_truth->motivation},
                             {"explanation", c.ground_truth->explanation}};
    return j;
}

MotivationCase case_from_json(const json& j) {
    try {
        MotivationCase c;
        c.id = j.at("id").get<std::string>();
        c.refactoring_type = j.at("refactoring_type").get<std::string>();
        c.abbreviation = j.value("abbreviation", "");
        c.description = j.at("description").get<std::string>();
        c.commit_id = j.value("commit", "");
        c.commit_message = j.at("commit_message").get<std::string>();
        c.code_diff = j.at("code_diff").get<std::string>();
        if (j.contains("ground_truth") && !j["ground_truth"].is_null())
            c.ground_truth = GroundTruth{j["ground_truth"].at("motivation").get<std::string>(),
                                         j["ground_truth"].at("explanation").get<std::string>()};
        return c;
    } catch (const json::exception& e) {
        throw MalformedJson(std::string("motivation case: ") + e.what());
    }
}

json to_json(const ConsensusRecord& r) {
    return {{"case_id", r.case_id},
            {"lrm", {{"motivation", r.lrm.motivation}, {"description", r.lrm.description}, {"reasoning", r.lrm.reasoning}}},
            {"v1", verdict_json(r.v1, false)},
            {"v2", verdict_json(r.v2, false)},
            {"v3", r.v3 ? verdict_json(*r.v3, true) : json(nullptr)},
            {"final_source", to_string(r.final_source)},
            {"final_motivation", r.final_motivation},
            {"raw_transcripts", r.raw_transcripts}};
}

ConsensusRecord record_from_json(const json& j) {
    try {
        ConsensusRecord r;
        r.case_id = j.at("case_id").get<std::string>();
        const auto& l = j.at("lrm");
        r.lrm = {l.at("motivation").get<std::string>(), l.at("description").get<std::string>(),
                 l.at("reasoning").get<std::string>()};
        r.v1 = verdict_from(j.at("v1"));
        r.v2 = verdict_from(j.at("v2"));
        if (!j.at("v3").is_null()) r.v3 = verdict_from(j["v3"]);
        r.final_source = role_from_string(j.at("final_source").get<std::string>());
        r.final_motivation = j.at("final_motivation").get<std::string>();
        for (const auto& t : j.value("raw_transcripts", json::array())) r.raw_transcripts.push_back(t);
        return r;
    } catch (const json::exception& e) {
        throw MalformedJson(std::string("consensus record: ") + e.what());
    }
}

json to_json(const AlignmentLabel& a) { return {{"label", to_string(a.value)}, {"reasoning", a.reasoning}}; }

json to_json(const CodingAssignment& a) {
    return {{"case_id", a.case_id},
            {"category", a.category},
            {"v1_category", a.v1_category},
            {"v2_category", a.v2_category},
            {"v3_decision", a.v3_decision ? json(*a.v3_decision) : json(nullptr)},
            {"reasoning", a.reasoning},
            {"raw_transcripts", a.raw_transcripts}};
}

json to_json(const CategoryPool& p) {
    json arr = json::array();
    for (const auto& c : p.categories())
        arr.push_back({{"name", c.name}, {"description", c.description}, {"created_by", c.created_by}});
    return arr;
}

}  // namespace refwhy::llm

#pragma once

#include "refwhy/error.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace refwhy::llm {

REFWHY_DEFINE_ERROR(EndpointUnreachable);
REFWHY_DEFINE_ERROR(EndpointError);
REFWHY_DEFINE_ERROR(MalformedModelOutput);
REFWHY_DEFINE_ERROR(ContextOverflow);
REFWHY_DEFINE_ERROR(BudgetExceeded);
REFWHY_DEFINE_ERROR(TemplateError);
REFWHY_DEFINE_ERROR(InsufficientRecords);

enum class Role { LRM, V1, V2, V3 };
const char* to_string(Role r);
Role role_from_string(const std::string& s);  // throws DomainError
inline constexpr Role kAllRoles[] = {Role::LRM, Role::V1, Role::V2, Role::V3};

struct ModelRole {
    Role role = Role::LRM;
    std::string endpoint = "http://127.0.0.1:1234";
    std::string model_name;
    double temperature = 0.8;
    std::size_t context_limit = 4096;  // tokens
    double timeout_s = 120;
    std::size_t max_retries = 3;
    double backoff_s = 0.5;  // first retry delay, doubled each attempt
    std::size_t max_in_flight = 2;
};

struct GroundTruth {
    std::string motivation;
    std::string explanation;
};

struct MotivationCase {
    std::string id;  // refactoring instance id
    std::string refactoring_type;
    std::string abbreviation;
    std::string description;
    std::string commit_id;
    std::string commit_message;
    std::string code_diff;
    std::optional<GroundTruth> ground_truth;
};

struct LrmOutput {
    std::string motivation;
    std::string description;
    std::string reasoning;
};

enum class Decision { agree, disagree };
const char* to_string(Decision d);
Decision decision_from_string(const std::string& s);

struct Verdict {
    Decision decision = Decision::agree;
    std::string reasoning;
    std::string motivation;  // V3 only: corrected motivation when it disagrees
};

struct ConsensusRecord {
    std::string case_id;
    LrmOutput lrm;
    Verdict v1, v2;
    std::optional<Verdict> v3;
    Role final_source = Role::LRM;
    std::string final_motivation;
    std::vector<nlohmann::json> raw_transcripts;  // request/response pairs in protocol order

    // The validators' collective decision on the LRM output.
    Decision llm_decision() const { return v3 ? v3->decision : v1.decision; }
};

enum class Alignment { yes, no, extends };
const char* to_string(Alignment a);
Alignment alignment_from_string(const std::string& s);

struct AlignmentLabel {
    Alignment value = Alignment::no;
    std::string reasoning;
};

struct Category {
    std::string name;
    std::string description;
    std::string created_by;  // case id
};

class CategoryPool {
public:
    // Case-insensitive lookup on trimmed names.
    const Category* find(const std::string& name) const;
    // Adds when absent; returns the stored entry either way.
    const Category& add(Category c);
    const std::vector<Category>& categories() const { return items_; }
    std::size_t size() const { return items_.size(); }

private:
    std::vector<Category> items_;
};

struct CodingAssignment {
    std::string case_id;
    std::string category;
    std::string v1_category, v2_category;
    std::optional<std::string> v3_decision;  // shared|v1|v2|new
    std::string reasoning;
    std::vector<nlohmann::json> raw_transcripts;
};

nlohmann::json to_json(const MotivationCase& c);
MotivationCase case_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ConsensusRecord& r);
ConsensusRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AlignmentLabel& a);
nlohmann::json to_json(const CodingAssignment& a);
nlohmann::json to_json(const CategoryPool& p);

}  // namespace refwhy::llm

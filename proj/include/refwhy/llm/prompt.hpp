#pragma once

#include "refwhy/llm/types.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace refwhy::llm {

enum class Task { motivation, validation, arbitration, alignment, coding, coding_resolution };
const char* to_string(Task t);
Task task_from_schema_name(const std::string& name);  // throws DomainError

// A template file has a "[system]" section and a "[user]" section; text
// may reference {{name}} placeholders.
struct PromptTemplate {
    std::string system;
    std::string user;
};

PromptTemplate parse_template(const std::string& text, const std::string& source = "<template>");
// Reads "<dir>/<task>.txt", falling back to the bundled default when
// `dir` is empty or has no file for the task.
PromptTemplate load_template(Task task, const std::string& dir = "");
PromptTemplate default_template(Task task);

// Required string fields and their allowed values (empty = free text).
struct OutputSchema {
    std::string name;
    std::vector<std::pair<std::string, std::vector<std::string>>> fields;

    nlohmann::json response_format() const;
    // Parses model text strictly; throws MalformedModelOutput.
    nlohmann::json parse(const std::string& content) const;
};

const OutputSchema& schema_for(Task task);

struct Budget {
    std::size_t context_limit = 4096;
    std::size_t response_reserve = 512;
    double bytes_per_token = 4.0;

    std::size_t tokens(std::size_t bytes) const;
};

struct Prompt {
    std::string system;
    std::string user;
    const OutputSchema* schema = nullptr;
    bool diff_truncated = false;
};

inline constexpr const char* kTruncationMarker = "[diff truncated]";

// Substitutes {{name}} from `vars`; a placeholder without a value throws
// TemplateError.
std::string render(const std::string& text, const std::map<std::string, std::string>& vars);

// Renders a task prompt. The "diff" variable is the only one that may be
// shortened: it keeps its head (earliest hunks) and ends with the marker.
// Throws BudgetExceeded when even an empty diff does not fit.
Prompt build_prompt(Task task, const PromptTemplate& tmpl, std::map<std::string, std::string> vars,
                    const Budget& budget);

// Variables describing a case: rt, description, commit_message, diff.
std::map<std::string, std::string> case_vars(const MotivationCase& c);
// The pool as a numbered list, or "(none yet)".
std::string format_pool(const CategoryPool& pool);

}  // namespace refwhy::llm

#include "refwhy/llm/prompt.hpp"

#include "refwhy/util/text.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace refwhy::llm {

using nlohmann::json;

namespace {

struct Embedded {
    const char* name;
    const char* text;
};

// Generated from prompts/*.txt at configure time.
const Embedded kEmbedded[] = {
#include "refwhy_prompts.inc"
};

constexpr Task kTasks[] = {Task::motivation, Task::validation,  Task::arbitration,
                           Task::alignment,  Task::coding,      Task::coding_resolution};

std::vector<std::string> required_placeholders(Task t) {
    switch (t) {
        case Task::coding:
        case Task::coding_resolution: return {"motivation", "pool"};
        default: return {"rt", "description", "commit_message", "diff"};
    }
}

void check_placeholders(Task t, const PromptTemplate& tmpl, const std::string& source) {
    for (const auto& p : required_placeholders(t))
        if (tmpl.user.find("{{" + p + "}}") == std::string::npos)
            throw TemplateError(source + ": user message lacks the {{" + p + "}} placeholder");
}

}  // namespace

const char* to_string(Task t) {
    switch (t) {
        case Task::motivation: return "motivation";
        case Task::validation: return "validation";
        case Task::arbitration: return "arbitration";
        case Task::alignment: return "alignment";
        case Task::coding: return "coding";
        case Task::coding_resolution: return "coding_resolution";
    }
    return "?";
}

Task task_from_schema_name(const std::string& name) {
    for (auto t : kTasks)
        if (name == to_string(t)) return t;
    throw DomainError("unknown task '" + name + "'");
}

PromptTemplate parse_template(const std::string& text, const std::string& source) {
    const auto sys = text.find("[system]\n");
    const auto usr = text.find("[user]\n");
    if (sys == std::string::npos || usr == std::string::npos || usr < sys)
        throw TemplateError(source + ": expected a [system] section followed by a [user] section");
    PromptTemplate t;
    t.system = util::trim(text.substr(sys + 9, usr - sys - 9));
    t.user = util::trim(text.substr(usr + 7));
    return t;
}

PromptTemplate default_template(Task task) {
    for (const auto& e : kEmbedded)
        if (std::string_view(e.name) == to_string(task)) return parse_template(e.text, e.name);
    throw TemplateError(std::string("no bundled template for ") + to_string(task));
}

PromptTemplate load_template(Task task, const std::string& dir) {
    PromptTemplate t;
    std::string source = std::string("bundled ") + to_string(task);
    const auto path = std::filesystem::path(dir) / (std::string(to_string(task)) + ".txt");
    if (dir.empty() || !std::filesystem::exists(path)) {
        t = default_template(task);
    } else {
        source = path.string();
        t = parse_template(util::read_file(source), source);
    }
    check_placeholders(task, t, source);
    return t;
}

json OutputSchema::response_format() const {
    json props = json::object();
    json required = json::array();
    for (const auto& [field, allowed] : fields) {
        json p = {{"type", "string"}};
        if (!allowed.empty()) p["enum"] = allowed;
        props[field] = p;
        required.push_back(field);
    }
    return {{"type", "json_schema"},
            {"json_schema",
             {{"name", name},
              {"strict", true},
              {"schema", {{"type", "object"}, {"properties", props}, {"required", required}, {"additionalProperties", false}}}}}};
}

json OutputSchema::parse(const std::string& content) const {
    json j;
    try {
        j = json::parse(content);
    } catch (const json::parse_error& e) {
        throw MalformedModelOutput(name + ": reply is not JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw MalformedModelOutput(name + ": reply is not a JSON object");
    for (const auto& [field, allowed] : fields) {
        auto it = j.find(field);
        if (it == j.end()) throw MalformedModelOutput(name + ": missing field '" + field + "'");
        if (!it->is_string()) throw MalformedModelOutput(name + ": field '" + field + "' is not a string");
        if (!allowed.empty() &&
            std::find(allowed.begin(), allowed.end(), it->get<std::string>()) == allowed.end())
            throw MalformedModelOutput(name + ": field '" + field + "' has invalid value '" +
                                       it->get<std::string>() + "'");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto& f : fields) known = known || f.first == it.key();
        if (!known) throw MalformedModelOutput(name + ": unexpected field '" + it.key() + "'");
    }
    return j;
}

const OutputSchema& schema_for(Task task) {
    static const std::map<Task, OutputSchema> schemas = {
        {Task::motivation, {"motivation", {{"motivation", {}}, {"description", {}}, {"reasoning", {}}}}},
        {Task::validation, {"validation", {{"decision", {"agree", "disagree"}}, {"reasoning", {}}}}},
        {Task::arbitration,
         {"arbitration", {{"decision", {"agree", "disagree"}}, {"motivation", {}}, {"reasoning", {}}}}},
        {Task::alignment, {"alignment", {{"label", {"yes", "no", "extends"}}, {"reasoning", {}}}}},
        {Task::coding, {"coding", {{"category", {}}, {"description", {}}, {"reasoning", {}}}}},
        {Task::coding_resolution,
         {"coding_resolution",
          {{"decision", {"v1", "v2", "new"}}, {"category", {}}, {"description", {}}, {"reasoning", {}}}}},
    };
    return schemas.at(task);
}

std::size_t Budget::tokens(std::size_t bytes) const {
    return static_cast<std::size_t>(std::ceil(static_cast<double>(bytes) / bytes_per_token));
}

std::string render(const std::string& text, const std::map<std::string, std::string>& vars) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto open = text.find("{{", pos);
        if (open == std::string::npos) break;
        auto close = text.find("}}", open + 2);
        if (close == std::string::npos) break;
        out.append(text, pos, open - pos);
        const std::string key = text.substr(open + 2, close - open - 2);
        auto it = vars.find(key);
        if (it == vars.end()) throw TemplateError("no value for placeholder {{" + key + "}}");
        out += it->second;
        pos = close + 2;
    }
    out.append(text, pos, std::string::npos);
    return out;
}

Prompt build_prompt(Task task, const PromptTemplate& tmpl, std::map<std::string, std::string> vars,
                    const Budget& budget) {
    Prompt p;
    p.schema = &schema_for(task);
    p.system = render(tmpl.system, vars);
    if (budget.context_limit <= budget.response_reserve)
        throw BudgetExceeded("context limit leaves no room beyond the response reserve");
    const std::size_t available = budget.context_limit - budget.response_reserve;

    const std::string diff = vars.count("diff") ? vars["diff"] : std::string();
    vars["diff"] = "";
    const std::size_t fixed = p.system.size() + render(tmpl.user, vars).size();
    if (budget.tokens(fixed) > available)
        throw BudgetExceeded("prompt needs " + std::to_string(budget.tokens(fixed)) + " tokens without any diff; " +
                             std::to_string(available) + " available");

    if (budget.tokens(fixed + diff.size()) <= available) {
        vars["diff"] = diff;
    } else {
        const std::string marker = std::string("\n") + kTruncationMarker;
        const auto max_bytes = static_cast<std::size_t>(static_cast<double>(available) * budget.bytes_per_token);
        std::size_t keep = max_bytes > fixed + marker.size() ? max_bytes - fixed - marker.size() : 0;
        keep = std::min(keep, diff.size());
        // Cut at a line boundary when one exists, and never inside a UTF-8 sequence.
        if (auto nl = diff.rfind('\n', keep ? keep - 1 : 0); nl != std::string::npos && nl + 1 <= keep && keep < diff.size())
            keep = nl + 1;
        while (keep > 0 && keep < diff.size() && (static_cast<unsigned char>(diff[keep]) & 0xC0) == 0x80) --keep;
        std::string cut = diff.substr(0, keep);
        if (!cut.empty() && cut.back() == '\n') cut.pop_back();
        vars["diff"] = cut + marker;
        p.diff_truncated = true;
    }
    p.user = render(tmpl.user, vars);
    return p;
}

std::map<std::string, std::string> case_vars(const MotivationCase& c) {
    return {{"rt", c.refactoring_type},
            {"description", c.description},
            {"commit_message", c.commit_message.empty() ? "(empty)" : c.commit_message},
            {"diff", c.code_diff}};
}

std::string format_pool(const CategoryPool& pool) {
    if (pool.size() == 0) return "(none yet)";
    std::string out;
    std::size_t i = 0;
    for (const auto& c : pool.categories()) {
        if (i) out += '\n';
        out += std::to_string(++i) + ". " + c.name + ": " + c.description;
    }
    return out;
}

}  // namespace refwhy::llm

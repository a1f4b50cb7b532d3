#pragma once

#include "refwhy/error.hpp"
#include "refwhy/refactoring/taxonomy.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace refwhy::refactoring {

REFWHY_DEFINE_ERROR(UnknownRefactoringType);

struct CodeLocation {
    std::string path;
    std::string kind;  // codeElementType
    std::string name;  // codeElement

    bool operator==(const CodeLocation&) const = default;
};

struct RefactoringInstance {
    std::string id;       // "<project>/<sha1>/<index within commit>"
    std::string project;
    std::string commit_id;
    const RefactoringType* type = nullptr;
    std::string description;
    std::vector<CodeLocation> left;
    std::vector<CodeLocation> right;

    // Right-side path if any, else left-side; empty when neither exists.
    std::string primary_path() const;

    bool operator==(const RefactoringInstance& o) const {
        return id == o.id && project == o.project && commit_id == o.commit_id && type == o.type &&
               description == o.description && left == o.left && right == o.right;
    }
};

// Parses RefactoringMiner output. `project` defaults to each commit's
// "repository" field, falling back to `default_project`.
std::vector<RefactoringInstance> parse_rm_json(const std::string& path,
                                               const std::string& default_project = "");
std::vector<RefactoringInstance> parse_rm_json_text(const std::string& text,
                                                    const std::string& default_project = "",
                                                    const std::string& source = "<memory>");

nlohmann::json to_json(const RefactoringInstance& r);
RefactoringInstance instance_from_json(const nlohmann::json& j);

class FrequencyTable {
public:
    void add(const RefactoringType& t) { ++counts_[t.name]; }
    std::size_t count(std::string_view name) const;
    std::size_t total() const;
    const std::map<std::string_view, std::size_t>& counts() const { return counts_; }

private:
    std::map<std::string_view, std::size_t> counts_;
};

FrequencyTable frequency_table(const std::vector<RefactoringInstance>& instances);

struct JoinReport {
    std::size_t joined = 0;
    std::vector<std::string> unmatched;  // instance ids whose commit was not mined
};

JoinReport join_instances(const std::vector<RefactoringInstance>& instances,
                          const std::set<std::string>& commit_ids);

}  // namespace refwhy::refactoring

#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace refwhy::history {

enum class ChangeKind { added, modified, deleted, renamed };

const char* to_string(ChangeKind k);
ChangeKind change_kind_from_string(const std::string& s);

struct FileChange {
    std::string path;
    std::optional<std::string> old_path;
    std::int64_t lines_added = 0;
    std::int64_t lines_deleted = 0;
    std::int64_t lines_before = 0;
    ChangeKind kind = ChangeKind::modified;
    bool binary = false;

    bool operator==(const FileChange&) const = default;
};

struct CommitRecord {
    std::string id;
    std::string author_id;
    std::int64_t timestamp = 0;
    std::string message;
    std::vector<std::string> parent_ids;
    std::vector<FileChange> changes;

    bool operator==(const CommitRecord&) const = default;
};

nlohmann::json to_json(const CommitRecord& c);
CommitRecord commit_from_json(const nlohmann::json& j);

}  // namespace refwhy::history

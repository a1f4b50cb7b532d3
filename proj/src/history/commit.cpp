#include "refwhy/history/commit.hpp"

#include "refwhy/error.hpp"

namespace refwhy::history {

const char* to_string(ChangeKind k) {
    switch (k) {
    case ChangeKind::added: return "added";
    case ChangeKind::modified: return "modified";
    case ChangeKind::deleted: return "deleted";
    case ChangeKind::renamed: return "renamed";
    }
    return "modified";
}

ChangeKind change_kind_from_string(const std::string& s) {
    if (s == "added") return ChangeKind::added;
    if (s == "modified") return ChangeKind::modified;
    if (s == "deleted") return ChangeKind::deleted;
    if (s == "renamed") return ChangeKind::renamed;
    throw MalformedJson("unknown change_kind '" + s + "'");
}

nlohmann::json to_json(const CommitRecord& c) {
    nlohmann::json changes = nlohmann::json::array();
    for (const auto& ch : c.changes) {
        nlohmann::json j = {
            {"path", ch.path},
            {"old_path", ch.old_path ? nlohmann::json(*ch.old_path) : nlohmann::json(nullptr)},
            {"lines_added", ch.lines_added},
            {"lines_deleted", ch.lines_deleted},
            {"lines_before", ch.lines_before},
            {"change_kind", to_string(ch.kind)},
        };
        if (ch.binary) j["binary"] = true;
        changes.push_back(std::move(j));
    }
    return {
        {"id", c.id},
        {"author_id", c.author_id},
        {"timestamp", c.timestamp},
        {"message", c.message},
        {"parent_ids", c.parent_ids},
        {"changes", std::move(changes)},
    };
}

CommitRecord commit_from_json(const nlohmann::json& j) {
    try {
        CommitRecord c;
        c.id = j.at("id").get<std::string>();
        c.author_id = j.at("author_id").get<std::string>();
        c.timestamp = j.at("timestamp").get<std::int64_t>();
        c.message = j.at("message").get<std::string>();
        c.parent_ids = j.at("parent_ids").get<std::vector<std::string>>();
        for (const auto& cj : j.at("changes")) {
            FileChange ch;
            ch.path = cj.at("path").get<std::string>();
            if (cj.contains("old_path") && !cj["old_path"].is_null())
                ch.old_path = cj["old_path"].get<std::string>();
            ch.lines_added = cj.at("lines_added").get<std::int64_t>();
            ch.lines_deleted = cj.at("lines_deleted").get<std::int64_t>();
            ch.lines_before = cj.at("lines_before").get<std::int64_t>();
            ch.kind = change_kind_from_string(cj.at("change_kind").get<std::string>());
            ch.binary = cj.value("binary", false);
            c.changes.push_back(std::move(ch));
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedJson(std::string("commit record: ") + e.what());
    }
}

}  // namespace refwhy::history

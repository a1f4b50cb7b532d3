#include "refwhy/refactoring/instance.hpp"

#include "refwhy/util/text.hpp"

#include <spdlog/spdlog.h>

namespace refwhy::refactoring {

using nlohmann::json;

namespace {

std::string string_or_empty(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw MalformedJson(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
}

std::vector<CodeLocation> parse_locations(const json& ref, const char* key) {
    std::vector<CodeLocation> out;
    auto it = ref.find(key);
    if (it == ref.end() || it->is_null()) return out;
    if (!it->is_array()) throw MalformedJson(std::string("'") + key + "' is not an array");
    for (const auto& loc : *it) {
        if (!loc.is_object()) throw MalformedJson(std::string("'") + key + "' entry is not an object");
        out.push_back({string_or_empty(loc, "filePath"), string_or_empty(loc, "codeElementType"),
                       string_or_empty(loc, "codeElement")});
    }
    return out;
}

json locations_json(const std::vector<CodeLocation>& locs) {
    json arr = json::array();
    for (const auto& l : locs) arr.push_back({{"path", l.path}, {"kind", l.kind}, {"name", l.name}});
    return arr;
}

std::vector<CodeLocation> locations_from(const json& arr) {
    std::vector<CodeLocation> out;
    for (const auto& l : arr)
        out.push_back({l.at("path").get<std::string>(), l.at("kind").get<std::string>(),
                       l.at("name").get<std::string>()});
    return out;
}

}  // namespace

std::string RefactoringInstance::primary_path() const {
    for (const auto& l : right)
        if (!l.path.empty()) return l.path;
    for (const auto& l : left)
        if (!l.path.empty()) return l.path;
    return {};
}

std::vector<RefactoringInstance> parse_rm_json_text(const std::string& text,
                                                    const std::string& default_project,
                                                    const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw MalformedJson(source + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("commits") || !doc["commits"].is_array())
        throw MalformedJson(source + ": expected a top-level 'commits' array");

    std::vector<RefactoringInstance> out;
    try {
        for (const auto& c : doc["commits"]) {
            if (!c.is_object()) throw MalformedJson("commit entry is not an object");
            std::string sha = string_or_empty(c, "sha1");
            if (sha.empty()) throw MalformedJson("commit entry without 'sha1'");
            std::string project = string_or_empty(c, "repository");
            if (project.empty()) project = default_project;
            // Strip URL-ish repository values down to the project name.
            if (auto slash = project.find_last_of('/'); slash != std::string::npos)
                project = project.substr(slash + 1);
            if (project.ends_with(".git")) project.resize(project.size() - 4);

            auto refs = c.find("refactorings");
            if (refs == c.end() || refs->is_null()) continue;
            if (!refs->is_array()) throw MalformedJson("'refactorings' of " + sha + " is not an array");
            std::size_t k = 0;
            for (const auto& r : *refs) {
                if (!r.is_object()) throw MalformedJson("refactoring entry in " + sha + " is not an object");
                std::string type_name = string_or_empty(r, "type");
                const RefactoringType* type = find_type(type_name);
                if (!type)
                    throw UnknownRefactoringType("'" + type_name + "' in commit " + sha + " (" + source + ")");
                RefactoringInstance inst;
                inst.project = project;
                inst.commit_id = sha;
                inst.id = project + "/" + sha + "/" + std::to_string(k++);
                inst.type = type;
                inst.description = string_or_empty(r, "description");
                inst.left = parse_locations(r, "leftSideLocations");
                inst.right = parse_locations(r, "rightSideLocations");
                out.push_back(std::move(inst));
            }
        }
    } catch (const MalformedJson& e) {
        throw MalformedJson(source + ": " + e.what());
    }
    return out;
}

std::vector<RefactoringInstance> parse_rm_json(const std::string& path,
                                               const std::string& default_project) {
    return parse_rm_json_text(util::read_file(path), default_project, path);
}

json to_json(const RefactoringInstance& r) {
    return {
        {"id", r.id},
        {"project", r.project},
        {"commit", r.commit_id},
        {"type", std::string(r.type->name)},
        {"abbreviation", std::string(r.type->abbreviation)},
        {"group", to_string(r.type->group)},
        {"description", r.description},
        {"left", locations_json(r.left)},
        {"right", locations_json(r.right)},
    };
}

RefactoringInstance instance_from_json(const json& j) {
    try {
        RefactoringInstance r;
        r.id = j.at("id").get<std::string>();
        r.project = j.at("project").get<std::string>();
        r.commit_id = j.at("commit").get<std::string>();
        auto name = j.at("type").get<std::string>();
        r.type = find_type(name);
        if (!r.type) throw UnknownRefactoringType("'" + name + "' in instance " + r.id);
        r.description = j.at("description").get<std::string>();
        r.left = locations_from(j.at("left"));
        r.right = locations_from(j.at("right"));
        return r;
    } catch (const json::exception& e) {
        throw MalformedJson(std::string("refactoring instance: ") + e.what());
    }
}

std::size_t FrequencyTable::count(std::string_view name) const {
    auto t = find_type(name);
    if (!t) return 0;
    auto it = counts_.find(t->name);
    return it == counts_.end() ? 0 : it->second;
}

std::size_t FrequencyTable::total() const {
    std::size_t n = 0;
    for (const auto& [k, v] : counts_) n += v;
    return n;
}

FrequencyTable frequency_table(const std::vector<RefactoringInstance>& instances) {
    FrequencyTable t;
    for (const auto& i : instances) t.add(*i.type);
    return t;
}

JoinReport join_instances(const std::vector<RefactoringInstance>& instances,
                          const std::set<std::string>& commit_ids) {
    JoinReport rep;
    for (const auto& i : instances) {
        if (commit_ids.count(i.commit_id))
            ++rep.joined;
        else
            rep.unmatched.push_back(i.id);
    }
    if (!rep.unmatched.empty())
        spdlog::warn("{} refactoring instance(s) reference commits absent from the mined history",
                     rep.unmatched.size());
    return rep;
}

}  // namespace refwhy::refactoring

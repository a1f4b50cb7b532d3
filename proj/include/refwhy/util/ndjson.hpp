#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace refwhy::util {

using json = nlohmann::json;

// Blank lines are skipped; a malformed line throws MalformedJson naming it.
std::vector<json> read_ndjson(const std::string& path);
std::vector<json> read_ndjson_text(const std::string& text, const std::string& source = "<memory>");
std::string to_ndjson(const std::vector<json>& records);
// Sorted-key, compact, UTF-8-preserving dump used everywhere bytes must be stable.
std::string canonical_dump(const json& j);

}  // namespace refwhy::util

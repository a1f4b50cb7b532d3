#include "refwhy/util/ndjson.hpp"

#include "refwhy/error.hpp"

#include <fstream>
#include <sstream>

namespace refwhy::util {

namespace {

std::vector<json> parse_lines(std::istream& in, const std::string& source) {
    std::vector<json> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw MalformedJson(source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

std::vector<json> read_ndjson(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return parse_lines(in, path);
}

std::vector<json> read_ndjson_text(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    return parse_lines(in, source);
}

std::string to_ndjson(const std::vector<json>& records) {
    std::string out;
    for (const auto& r : records) {
        out += canonical_dump(r);
        out += '\n';
    }
    return out;
}

std::string canonical_dump(const json& j) {
    // nlohmann's object type is std::map, so keys already come out sorted.
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace refwhy::util

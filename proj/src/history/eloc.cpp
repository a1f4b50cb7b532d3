#include "refwhy/history/eloc.hpp"

#include <string>

namespace refwhy::history {

namespace {

bool is_blank_char(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

// Position just past the closing quote, or npos when the literal does not
// close on this line.
std::size_t literal_end(std::string_view line, std::size_t open) {
    char q = line[open];
    for (std::size_t i = open + 1; i < line.size(); ++i) {
        if (line[i] == '\\') {
            ++i;
            continue;
        }
        if (line[i] == q) return i + 1;
    }
    return std::string_view::npos;
}

}  // namespace

Language language_for_path(std::string_view path) {
    constexpr std::string_view ext = ".java";
    if (path.size() >= ext.size() && path.substr(path.size() - ext.size()) == ext)
        return Language::java;
    return Language::other;
}

std::int64_t count_effective_loc(std::string_view content, Language lang) {
    std::int64_t count = 0;
    bool in_block = false;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t nl = content.find('\n', start);
        std::string_view line = content.substr(start, nl == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : nl - start);
        start = nl == std::string_view::npos ? content.size() : nl + 1;

        bool code = false;
        if (lang == Language::other) {
            for (char c : line)
                if (!is_blank_char(c)) {
                    code = true;
                    break;
                }
            if (code) ++count;
            continue;
        }

        std::size_t i = 0;
        while (i < line.size()) {
            if (in_block) {
                auto close = line.find("*/", i);
                if (close == std::string_view::npos) {
                    i = line.size();
                } else {
                    in_block = false;
                    i = close + 2;
                }
                continue;
            }
            char c = line[i];
            if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') break;
            if (c == '/' && i + 1 < line.size() && line[i + 1] == '*') {
                in_block = true;
                i += 2;
                continue;
            }
            if (is_blank_char(c)) {
                ++i;
                continue;
            }
            code = true;
            if (c == '"' || c == '\'') {
                auto end = literal_end(line, i);
                i = end == std::string_view::npos ? i + 1 : end;
                continue;
            }
            ++i;
        }
        if (code) ++count;
    }
    return count;
}

}  // namespace refwhy::history

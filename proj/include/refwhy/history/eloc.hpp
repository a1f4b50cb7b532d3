#pragma once

#include <cstdint>
#include <string_view>

namespace refwhy::history {

enum class Language { java, other };

Language language_for_path(std::string_view path);

// Lines that are neither blank nor comment-only. For Java a line-oriented
// state machine tracks `//` and `/* ... */` (possibly spanning lines); comment
// markers inside string or char literals are ignored only when the literal
// closes on the same line.
std::int64_t count_effective_loc(std::string_view content, Language lang);

}  // namespace refwhy::history

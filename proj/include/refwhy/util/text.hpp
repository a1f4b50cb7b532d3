#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refwhy::util {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Fixed-point rendering with the given number of decimals ("-0.000000" is
// normalized to "0.000000").
std::string format_fixed(double v, int decimals);
// Shortest round-trip rendering.
std::string format_double(double v);

// Whole-string numeric parse; nullopt on any trailing garbage or empty input.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Parent directory of a repo-relative path ("" for top-level files).
std::string parent_dir(std::string_view path);
// First path segment ("" for top-level files).
std::string first_segment(std::string_view path);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view data);

}  // namespace refwhy::util

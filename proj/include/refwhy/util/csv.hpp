#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace refwhy::util {

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
// newlines. Handles \n and \r\n record terminators.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // False at end of input.
    bool next(std::vector<std::string>& row);
    // 1-based physical line where the last returned record started.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

// Header-indexed view used by the ingest code.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;

    // -1 when absent.
    int column(std::string_view name) const;
};

CsvTable read_csv_file(const std::string& path);

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace refwhy::util

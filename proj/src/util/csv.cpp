#include "refwhy/util/csv.hpp"

#include "refwhy/error.hpp"

#include <fstream>

namespace refwhy::util {

bool CsvReader::next(std::vector<std::string>& row) {
    row.clear();
    int c = in_.get();
    if (c == EOF) return false;
    record_line_ = line_;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (;; c = in_.get()) {
        if (c == EOF) {
            if (quoted) throw MalformedCsv("unterminated quote starting on line " +
                                           std::to_string(record_line_));
            row.push_back(std::move(field));
            return true;
        }
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line_;
                field += ch;
            }
            continue;
        }
        if (ch == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (ch == '\r' && in_.peek() == '\n') {
            continue;
        } else if (ch == '\n') {
            ++line_;
            row.push_back(std::move(field));
            return true;
        } else {
            field += ch;
            field_started = true;
        }
    }
}

int CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    CsvReader reader(in);
    CsvTable t;
    std::vector<std::string> row;
    if (!reader.next(row)) return t;
    if (!row.empty() && row[0].rfind("\xEF\xBB\xBF", 0) == 0) row[0].erase(0, 3);
    t.header = row;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        t.rows.push_back(row);
        t.lines.push_back(reader.line());
    }
    return t;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

}  // namespace refwhy::util

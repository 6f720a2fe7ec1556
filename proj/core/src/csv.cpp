#include "cellfit/csv.hpp"

#include <fstream>
#include <sstream>

#include "cellfit/errors.hpp"

namespace cellfit {
namespace {

// Splits one CSV document into records of fields, honouring quoted fields
// (embedded commas, newlines, and doubled quotes).
std::vector<std::vector<std::string>> parse_records(const std::string& text, char delim) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == delim) {
            end_field();
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty() && !field_started) {
                    quoted = true;
                    field_started = true;
                } else {
                    throw IoError("stray quote inside unquoted CSV field");
                }
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break; // swallow, \n ends record
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (quoted) throw IoError("unterminated quoted CSV field");
    // final record without trailing newline
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

bool needs_quoting(const std::string& s, char delim) {
    return s.find_first_of("\"\r\n") != std::string::npos ||
           s.find(delim) != std::string::npos;
}

void append_field(std::string& out, const std::string& s, char delim) {
    if (!needs_quoting(s, delim)) {
        out += s;
        return;
    }
    out.push_back('"');
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

} // namespace

int RawTable::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

RawTable parse_csv(const std::string& text, char delim) {
    auto records = parse_records(text, delim);
    if (records.empty()) throw IoError("CSV document has no header row");
    RawTable table;
    table.columns = std::move(records.front());
    for (size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != table.columns.size())
            throw IoError("CSV row " + std::to_string(i) + " has " +
                          std::to_string(records[i].size()) + " fields, header has " +
                          std::to_string(table.columns.size()));
        table.rows.push_back(std::move(records[i]));
    }
    return table;
}

RawTable read_csv(const std::string& path, char delim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), delim);
}

std::string to_csv(const RawTable& table, char delim) {
    std::string out;
    for (size_t j = 0; j < table.columns.size(); ++j) {
        if (j) out.push_back(delim);
        append_field(out, table.columns[j], delim);
    }
    out.push_back('\n');
    for (const auto& row : table.rows) {
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) out.push_back(delim);
            append_field(out, row[j], delim);
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv(const RawTable& table, const std::string& path, char delim) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << to_csv(table, delim);
    if (!out) throw IoError("failed writing CSV to: " + path);
}

const std::vector<std::string>& default_missing_tokens() {
    static const std::vector<std::string> tokens = {"", "NA", "N/A", "?"};
    return tokens;
}

bool is_missing_token(const std::string& cell) {
    for (const auto& token : default_missing_tokens())
        if (cell == token) return true;
    return false;
}

} // namespace cellfit

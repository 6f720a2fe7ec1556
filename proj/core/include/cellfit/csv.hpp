#pragma once
#include <string>
#include <vector>

namespace cellfit {

// Minimal RFC-4180-style table: quoted fields may contain commas, doubled
// quotes, and newlines. Every row must match the header width.
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const; // -1 when absent
};

// The delimiter defaults to a comma; anything except '"', CR, and LF works.
RawTable read_csv(const std::string& path, char delim = ',');
RawTable parse_csv(const std::string& text, char delim = ',');

std::string to_csv(const RawTable& table, char delim = ',');
void write_csv(const RawTable& table, const std::string& path, char delim = ',');

// Cell spellings treated as missing: "", "NA", "N/A", "?" (case-sensitive).
const std::vector<std::string>& default_missing_tokens();
bool is_missing_token(const std::string& cell);

} // namespace cellfit

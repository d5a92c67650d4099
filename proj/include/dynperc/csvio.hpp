#pragma once

#include <string>
#include <vector>

namespace dynperc {

// Shortest decimal that round-trips the double exactly (std::to_chars); keeps
// output files byte-stable across runs with the same seed.
std::string format_double(double x);

// Write-then-rename within the target directory, so readers never observe a
// partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

// Plain CSV with '#'-prefixed metadata header lines.
struct CsvTable {
    std::vector<std::string> meta;     // emitted as "# key=value" lines
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_meta(const std::string& key, const std::string& value);
    void add_row(std::vector<std::string> row);
    std::string to_string() const;
};

std::string csv_field(double x);
std::string csv_field(long long x);
std::string csv_field(const std::string& s);

// Inverse of CsvTable::to_string: leading "# key=value" lines become meta
// entries (prefix stripped), the first non-meta line is the column header,
// and every remaining line is split on ',' into one row. Throws
// std::invalid_argument on a ragged row or when no header line is present.
CsvTable parse_csv(const std::string& text);

}  // namespace dynperc

#include "dynperc/csvio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace dynperc {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp);
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write_file_atomic: write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("write_file_atomic: rename failed for " + path);
    }
}

void CsvTable::add_meta(const std::string& key, const std::string& value) {
    meta.push_back(key + "=" + value);
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("CsvTable: row width mismatch");
    rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
    std::string out;
    for (const auto& m : meta) {
        out += "# ";
        out += m;
        out += '\n';
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out += columns[i];
        out += i + 1 < columns.size() ? ',' : '\n';
    }
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out += r[i];
            out += i + 1 < r.size() ? ',' : '\n';
        }
    }
    return out;
}

std::string csv_field(double x) { return format_double(x); }
std::string csv_field(long long x) { return std::to_string(x); }
std::string csv_field(const std::string& s) { return s; }

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t body = line.find_first_not_of(" ", 1);
            table.meta.push_back(body == std::string::npos ? "" : line.substr(body));
            continue;
        }
        if (!have_header) {
            table.columns = split_fields(line);
            have_header = true;
            continue;
        }
        std::vector<std::string> row = split_fields(line);
        if (row.size() != table.columns.size())
            throw std::invalid_argument("parse_csv: ragged row: " + line);
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw std::invalid_argument("parse_csv: missing header line");
    return table;
}

}  // namespace dynperc

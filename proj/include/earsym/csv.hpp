#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "earsym/error.hpp"

namespace earsym {

/// Shortest form with at most `digits` significant digits ("%.Ng").
/// CSV output uses 9 digits, JSON output 17 (which round-trips doubles exactly).
inline std::string format_double(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return buf;
}

/// Round a score through its 9-significant-digit CSV representation, so
/// in-memory pipelines produce the same numbers as ones staged through files.
inline double csv_round(double value) {
    return std::strtod(format_double(value, 9).c_str(), nullptr);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

/// Split one CSV line on commas. No quoting: ids and numbers only.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

/// File contents split into lines; tolerates CRLF and a missing final newline.
inline std::vector<std::string> read_lines(const std::string& path) {
    std::string text = read_text_file(path);
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) {
        if (cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
    }
    return lines;
}

inline double parse_double_field(const std::string& field, const std::string& path, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": expected a number, got '" + field + "'");
    }
}

inline long long parse_int_field(const std::string& field, const std::string& path, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(field, &pos);
        if (pos != field.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": expected an integer, got '" + field + "'");
    }
}

}  // namespace earsym

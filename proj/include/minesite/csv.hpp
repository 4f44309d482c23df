#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"

namespace minesite::csv {

struct Row {
    std::size_t line = 0; // 1-based line where the record starts
    std::vector<std::string> fields;
};

/// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
inline std::vector<Row> read(std::istream& in, const std::string& source = "<csv>") {
    std::vector<Row> rows;
    Row cur;
    std::string field;
    bool quoted = false, in_quotes = false, any = false;
    std::size_t line = 1;
    cur.line = 1;
    auto end_field = [&] {
        cur.fields.push_back(std::move(field));
        field.clear();
        quoted = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(cur.fields.size() == 1 && cur.fields[0].empty())) rows.push_back(std::move(cur));
        cur = Row{};
        cur.line = line;
        any = false;
    };
    char ch;
    while (in.get(ch)) {
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
        case '"':
            if (!field.empty() || quoted)
                fail(ErrorKind::Validation, source + ":" + std::to_string(line) + ": stray quote in field");
            in_quotes = quoted = any = true;
            break;
        case ',':
            end_field();
            any = true;
            break;
        case '\r':
            break;
        case '\n':
            ++line;
            end_row();
            break;
        default:
            if (quoted)
                fail(ErrorKind::Validation, source + ":" + std::to_string(line) + ": text after closing quote");
            field.push_back(ch);
            any = true;
        }
    }
    if (in_quotes) fail(ErrorKind::Validation, source + ":" + std::to_string(cur.line) + ": unterminated quote");
    if (any || !field.empty()) end_row();
    return rows;
}

inline std::string escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

/// One RFC-4180 record, CRLF terminated.
inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << "\r\n";
}

} // namespace minesite::csv

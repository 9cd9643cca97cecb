#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "offsetsim/errors.hpp"

namespace offsetsim::csv {

// RFC-4180ish quoting: quote when the field contains comma, quote, or newline.
inline std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string join_row(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += escape(fields[i]);
    }
    line += '\n';
    return line;
}

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open for writing: " + path);
    }

    void row(const std::vector<std::string>& fields) { out_ << join_row(fields); }

private:
    std::ofstream out_;
};

// Parses one CSV record (may span lines when fields contain quoted newlines).
// Returns false on end of stream.
inline bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            // swallow; \n handled next iteration
        } else {
            field += ch;
        }
    }
    if (!any) return false;
    fields.push_back(field);
    return true;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path);
    Table t;
    if (!read_record(in, t.header)) return t;
    std::vector<std::string> fields;
    while (read_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        t.rows.push_back(fields);
    }
    return t;
}

}  // namespace offsetsim::csv

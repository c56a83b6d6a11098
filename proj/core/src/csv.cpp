#include "alluvial/csv.hpp"

namespace alluvial::csv {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\r' && i + 1 == line.size()) {
            // trailing CR from CRLF files
        } else {
            field += ch;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::vector<std::vector<std::string>> parse(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool quoted = false;
    auto flush = [&] {
        if (!line.empty() && line != "\r") rows.push_back(split_row(line));
        line.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '"') {
            if (quoted && i + 1 < text.size() && text[i + 1] == '"') {
                line += "\"\"";
                ++i;
                continue;
            }
            quoted = !quoted;
            line += ch;
        } else if (ch == '\n' && !quoted) {
            flush();
        } else {
            line += ch;
        }
    }
    flush();
    return rows;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        const std::string& field = fields[i];
        if (field.find_first_of(",\"\n") != std::string::npos) {
            out += '"';
            for (char ch : field) {
                if (ch == '"') out += '"';
                out += ch;
            }
            out += '"';
        } else {
            out += field;
        }
    }
    return out;
}

} // namespace alluvial::csv

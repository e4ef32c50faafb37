#include "csv.hpp"

#include "vitd/error.hpp"

namespace vitd::detail {

std::vector<Record> read_csv(std::string_view content, char separator) {
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false; // distinguishes `` (no fields) from `""`
    std::size_t line = 1;
    std::size_t quote_line = 0;

    auto end_record = [&] {
        if (field_started || !current.fields.empty()) {
            current.fields.push_back(std::move(field));
            records.push_back(std::move(current));
        }
        current = Record{};
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (current.line == 0) current.line = line;
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
            field_started = true;
            quote_line = line;
        } else if (c == separator) {
            current.fields.push_back(std::move(field));
            field.clear();
            field_started = true;
        } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
            // CRLF; the LF ends the record.
        } else if (c == '\n') {
            end_record();
            ++line;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw ParseError(0, "unterminated quoted field starting on line " + std::to_string(quote_line));
    end_record();
    return records;
}

std::vector<Record> read_tsv(std::string_view content) {
    std::vector<Record> records;
    std::size_t line = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        ++line;
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string_view::npos) eol = content.size();
        std::string_view row = content.substr(pos, eol - pos);
        if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
        pos = eol + 1;
        if (row.empty()) continue;

        Record record;
        record.line = line;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = row.find('\t', start);
            if (tab == std::string_view::npos) {
                record.fields.emplace_back(row.substr(start));
                break;
            }
            record.fields.emplace_back(row.substr(start, tab - start));
            start = tab + 1;
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::string csv_escape(std::string_view field, char separator) {
    if (field.find_first_of(std::string{separator} + "\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace vitd::detail

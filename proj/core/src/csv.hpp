#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vitd::detail {

struct Record {
    std::size_t line = 0; // 1-based physical line where the record starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields may contain separators, doubled quotes
/// and line breaks. Accepts LF or CRLF record terminators. Blank lines are
/// skipped. Throws ParseError on an unterminated quote.
std::vector<Record> read_csv(std::string_view content, char separator = ',');

/// Tab-separated reader without quoting: one record per line, CR stripped.
std::vector<Record> read_tsv(std::string_view content);

/// Quotes the field when it contains the separator, a quote or a line break.
std::string csv_escape(std::string_view field, char separator = ',');

} // namespace vitd::detail

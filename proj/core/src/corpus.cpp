#include "vitd/corpus.hpp"

#include "csv.hpp"
#include "vitd/error.hpp"
#include "vitd/random.hpp"

#include <json.hpp>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <unordered_set>

namespace vitd {
namespace {

bool is_valid_utf8(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    int32_t length = 0;
    u_strFromUTF8(nullptr, 0, &length, s.data(), static_cast<int32_t>(s.size()), &status);
    return status == U_BUFFER_OVERFLOW_ERROR || U_SUCCESS(status);
}

std::string synthesize_id(std::size_t row) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "row-%06zu", row);
    return buf;
}

bool is_blank(std::string_view content) {
    return std::all_of(content.begin(), content.end(),
                       [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

class ExampleBuilder {
public:
    explicit ExampleBuilder(const DataSchema& schema) : m_schema(schema) {}

    void add(std::size_t row, std::optional<std::string> id, std::string_view raw_text,
             std::optional<LabelClass> label) {
        if (!is_valid_utf8(raw_text)) throw ParseError(row, "text is not valid UTF-8");
        std::string text = normalize_text(raw_text);
        if (text.empty() && !m_schema.allow_empty_text) throw SchemaError(row, "empty text");

        std::string example_id = id ? std::move(*id) : synthesize_id(row);
        if (example_id.empty()) throw SchemaError(row, "empty id");
        if (!is_valid_utf8(example_id)) throw ParseError(row, "id is not valid UTF-8");
        if (!m_seen.insert(example_id).second) throw SchemaError(row, "duplicate id '" + example_id + "'");

        m_examples.push_back(Example{std::move(example_id), std::move(text), label});
    }

    std::vector<Example> take() { return std::move(m_examples); }

private:
    const DataSchema& m_schema;
    std::unordered_set<std::string> m_seen;
    std::vector<Example> m_examples;
};

std::optional<std::size_t> find_column(const std::vector<std::string>& header, const std::string& name) {
    if (name.empty()) return std::nullopt;
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(std::distance(header.begin(), it));
}

std::vector<Example> parse_delimited(const std::vector<detail::Record>& records, const DataSchema& schema) {
    if (records.empty()) return {};
    std::vector<std::string> header = records.front().fields;
    // Tolerate a UTF-8 byte order mark on the first header cell.
    if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

    const auto text_col = find_column(header, schema.text);
    if (!text_col) throw SchemaError(0, "header has no text column '" + schema.text + "'");
    const auto id_col = find_column(header, schema.id);
    const auto label_col = find_column(header, schema.label);

    ExampleBuilder builder(schema);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& fields = records[r].fields;
        if (fields.size() != header.size()) {
            throw ParseError(r, "expected " + std::to_string(header.size()) + " columns, found " +
                                    std::to_string(fields.size()));
        }
        std::optional<LabelClass> label;
        if (label_col && !fields[*label_col].empty()) {
            label = parse_label(fields[*label_col]);
            if (!label) throw SchemaError(r, "label '" + fields[*label_col] + "' outside {0,1,2}");
        }
        std::optional<std::string> id;
        if (id_col) id = fields[*id_col];
        builder.add(r, std::move(id), fields[*text_col], label);
    }
    return builder.take();
}

std::vector<Example> parse_json_lines(std::string_view content, const DataSchema& schema) {
    ExampleBuilder builder(schema);
    std::size_t pos = 0;
    std::size_t row = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string_view::npos) eol = content.size();
        std::string_view line = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (is_blank(line)) continue;
        ++row;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(row, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(row, "expected a JSON object");

        auto text_it = obj.find(schema.text);
        if (text_it == obj.end() || !text_it->is_string()) {
            throw SchemaError(row, "missing string field '" + schema.text + "'");
        }

        std::optional<std::string> id;
        if (!schema.id.empty()) {
            auto id_it = obj.find(schema.id);
            if (id_it != obj.end() && !id_it->is_null()) {
                if (!id_it->is_string()) throw SchemaError(row, "field '" + schema.id + "' must be a string");
                id = id_it->get<std::string>();
            }
        }

        std::optional<LabelClass> label;
        if (!schema.label.empty()) {
            auto label_it = obj.find(schema.label);
            if (label_it != obj.end() && !label_it->is_null()) {
                if (!label_it->is_number_integer()) {
                    throw SchemaError(row, "label " + label_it->dump() + " outside {0,1,2}");
                }
                label = label_from_code(label_it->get<long long>());
                if (!label) throw SchemaError(row, "label " + label_it->dump() + " outside {0,1,2}");
            }
        }
        builder.add(row, std::move(id), text_it->get<std::string>(), label);
    }
    return builder.take();
}

} // namespace

DatasetSplit::DatasetSplit(std::string name, std::vector<Example> examples)
    : m_name(std::move(name)), m_examples(std::move(examples)) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < m_examples.size(); ++i) {
        const auto& ex = m_examples[i];
        if (ex.id.empty()) throw SchemaError(i + 1, "empty id");
        if (!seen.insert(ex.id).second) throw SchemaError(i + 1, "duplicate id '" + ex.id + "'");
        if (!ex.label) m_labeled = false;
    }
}

std::vector<std::string> DatasetSplit::ids() const {
    std::vector<std::string> out;
    out.reserve(m_examples.size());
    for (const auto& ex : m_examples) out.push_back(ex.id);
    return out;
}

std::vector<LabelClass> DatasetSplit::gold_labels() const {
    if (!m_labeled) throw ArgumentError("split '" + m_name + "' is not fully labeled");
    std::vector<LabelClass> out;
    out.reserve(m_examples.size());
    for (const auto& ex : m_examples) out.push_back(*ex.label);
    return out;
}

std::optional<DataFormat> parse_data_format(std::string_view name) noexcept {
    if (name == "tsv") return DataFormat::Tsv;
    if (name == "csv") return DataFormat::Csv;
    if (name == "json-lines" || name == "jsonl") return DataFormat::JsonLines;
    return std::nullopt;
}

std::string_view data_format_name(DataFormat format) noexcept {
    switch (format) {
    case DataFormat::Tsv: return "tsv";
    case DataFormat::Csv: return "csv";
    case DataFormat::JsonLines: return "json-lines";
    }
    return "?";
}

DatasetSplit parse_split(std::string_view content, DataFormat format, const DataSchema& schema,
                         std::string name) {
    if (is_blank(content)) throw EmptyInputError("empty input");
    std::vector<Example> examples;
    switch (format) {
    case DataFormat::Tsv: examples = parse_delimited(detail::read_tsv(content), schema); break;
    case DataFormat::Csv: examples = parse_delimited(detail::read_csv(content), schema); break;
    case DataFormat::JsonLines: examples = parse_json_lines(content, schema); break;
    }
    return DatasetSplit(std::move(name), std::move(examples));
}

DatasetSplit load_split(const std::filesystem::path& path, DataFormat format, const DataSchema& schema,
                        std::string name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open file");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(path.string(), "read failed");
    try {
        return parse_split(content, format, schema, std::move(name));
    } catch (const EmptyInputError&) {
        throw EmptyInputError(path.string() + ": empty input");
    }
}

void write_split(std::ostream& out, const DatasetSplit& split, DataFormat format, const DataSchema& schema) {
    const std::string id_name = schema.id.empty() ? "id" : schema.id;
    const std::string label_name = schema.label.empty() ? "label" : schema.label;

    if (format == DataFormat::JsonLines) {
        for (const auto& ex : split.examples()) {
            nlohmann::ordered_json obj;
            obj[id_name] = ex.id;
            obj[schema.text] = ex.text;
            if (ex.label) obj[label_name] = label_code(*ex.label);
            out << obj.dump() << '\n';
        }
        return;
    }

    const char sep = format == DataFormat::Tsv ? '\t' : ',';
    auto cell = [&](std::string_view value) -> std::string {
        if (format == DataFormat::Csv) return detail::csv_escape(value, sep);
        if (value.find_first_of("\t\r\n") != std::string_view::npos) {
            throw ArgumentError("value '" + std::string(value) + "' cannot be written as TSV");
        }
        return std::string(value);
    };
    out << cell(id_name) << sep << cell(schema.text) << sep << cell(label_name) << '\n';
    for (const auto& ex : split.examples()) {
        out << cell(ex.id) << sep << cell(ex.text) << sep;
        if (ex.label) out << label_code(*ex.label);
        out << '\n';
    }
}

std::string normalize_text(std::string_view raw) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error(std::string("ICU NFC unavailable: ") + u_errorName(status));

    const icu::UnicodeString source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    const icu::UnicodeString composed = nfc->normalize(source, status);
    if (U_FAILURE(status)) throw Error(std::string("NFC normalization failed: ") + u_errorName(status));

    icu::UnicodeString collapsed;
    bool pending_space = false;
    for (int32_t i = 0; i < composed.length(); i = composed.moveIndex32(i, 1)) {
        const UChar32 c = composed.char32At(i);
        if (u_isUWhiteSpace(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !collapsed.isEmpty()) collapsed.append(static_cast<UChar>(0x20));
        pending_space = false;
        collapsed.append(c);
    }

    std::string out;
    collapsed.toUTF8String(out);
    return out;
}

std::size_t word_count(std::string_view normalized) {
    std::size_t count = 0;
    bool in_word = false;
    for (unsigned char c : normalized) {
        const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

SplitStats compute_stats(const DatasetSplit& split) {
    SplitStats stats;
    stats.count = split.size();
    for (const auto& ex : split.examples()) {
        stats.max_word_count = std::max(stats.max_word_count, word_count(ex.text));
    }
    if (split.empty() || !split.labeled()) return stats;

    for (LabelClass c : kAllLabels) stats.per_class_counts[c] = 0;
    for (const auto& ex : split.examples()) ++stats.per_class_counts[*ex.label];
    for (const auto& [label, n] : stats.per_class_counts) {
        stats.per_class_fractions[label] = static_cast<double>(n) / static_cast<double>(stats.count);
    }
    return stats;
}

DatasetSplit stratified_subsample(const DatasetSplit& split, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ArgumentError("subsample fraction must be in (0, 1], got " + std::to_string(fraction));
    }
    if (!split.labeled()) throw ArgumentError("stratified_subsample requires a labeled split");

    std::array<std::vector<std::size_t>, kNumClasses> by_class;
    const auto& examples = split.examples();
    for (std::size_t i = 0; i < examples.size(); ++i) by_class[label_index(*examples[i].label)].push_back(i);

    DeterministicRng rng(seed);
    std::vector<std::size_t> chosen;
    for (auto& indices : by_class) {
        const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(indices.size())));
        rng.shuffle(std::span<std::size_t>(indices));
        chosen.insert(chosen.end(), indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::sort(chosen.begin(), chosen.end());

    std::vector<Example> kept;
    kept.reserve(chosen.size());
    for (std::size_t i : chosen) kept.push_back(examples[i]);
    return DatasetSplit(split.name(), std::move(kept));
}

} // namespace vitd

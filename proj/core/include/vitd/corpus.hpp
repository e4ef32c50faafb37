#pragma once

#include "vitd/label.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vitd {

struct Example {
    std::string id;
    std::string text;
    std::optional<LabelClass> label;

    bool operator==(const Example&) const = default;
};

/// A named, ordered collection of examples. Immutable after construction;
/// example order is file order.
class DatasetSplit {
public:
    DatasetSplit() = default;
    /// Throws SchemaError on an empty or duplicate id.
    DatasetSplit(std::string name, std::vector<Example> examples);

    const std::string& name() const noexcept { return m_name; }
    const std::vector<Example>& examples() const noexcept { return m_examples; }
    std::size_t size() const noexcept { return m_examples.size(); }
    bool empty() const noexcept { return m_examples.empty(); }

    /// True iff every example carries a label (vacuously true when empty).
    bool labeled() const noexcept { return m_labeled; }

    std::vector<std::string> ids() const;
    /// Gold labels in example order. Throws ArgumentError when unlabeled.
    std::vector<LabelClass> gold_labels() const;

    bool operator==(const DatasetSplit&) const = default;

private:
    std::string m_name;
    std::vector<Example> m_examples;
    bool m_labeled = true;
};

enum class DataFormat { Tsv, Csv, JsonLines };

std::optional<DataFormat> parse_data_format(std::string_view name) noexcept;
std::string_view data_format_name(DataFormat format) noexcept;

/// Column (or JSON field) names. An empty `id` or `label` name means the
/// column is not expected.
struct DataSchema {
    std::string id = "id";
    std::string text = "text";
    std::string label = "label";
    bool allow_empty_text = false;
};

/// Loads a split. Rows without an id get `row-%06d` (1-based data row);
/// texts pass through normalize_text.
///
/// Errors: IoError (unreadable), EmptyInputError (zero-byte file),
/// ParseError (bad UTF-8, wrong column count, bad JSON), SchemaError
/// (label outside {0,1,2}, duplicate id, missing text column, empty text).
DatasetSplit load_split(const std::filesystem::path& path, DataFormat format,
                        const DataSchema& schema = {}, std::string name = "custom");

/// Parses in-memory file content; same contract as load_split.
DatasetSplit parse_split(std::string_view content, DataFormat format,
                         const DataSchema& schema = {}, std::string name = "custom");

/// Writes the split with columns (id, text, label) named per `schema`.
/// Loading the output reproduces the split.
void write_split(std::ostream& out, const DatasetSplit& split, DataFormat format,
                 const DataSchema& schema = {});

/// NFC-composes, collapses every run of Unicode whitespace into a single
/// U+0020 and trims both ends. Invalid UTF-8 sequences become U+FFFD.
std::string normalize_text(std::string_view raw);

/// Whitespace-separated token count of already-normalized text.
std::size_t word_count(std::string_view normalized);

struct SplitStats {
    std::size_t count = 0;
    /// Empty unless the split is labeled and non-empty.
    std::map<LabelClass, std::size_t> per_class_counts;
    std::map<LabelClass, double> per_class_fractions;
    std::size_t max_word_count = 0;
};

SplitStats compute_stats(const DatasetSplit& split);

/// Keeps round(fraction * n_c) examples of each class c, chosen by a seeded
/// shuffle, in input order. Throws ArgumentError when fraction is outside
/// (0, 1] or the split is unlabeled.
DatasetSplit stratified_subsample(const DatasetSplit& split, double fraction, std::uint64_t seed);

} // namespace vitd

#pragma once

#include "vitd/corpus.hpp"
#include "vitd/label.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vitd {

using Logits = std::array<double, kNumClasses>;

/// Index of the largest logit; ties go to the lowest index.
LabelClass argmax_label(const Logits& logits) noexcept;

/// One model's output on one example. Construct through make_record() to get
/// the invariants checked.
struct PredictionRecord {
    std::string example_id;
    std::string model_id;
    std::optional<Logits> logits;
    LabelClass label = LabelClass::NonViolence;

    bool operator==(const PredictionRecord&) const = default;
};

/// Derives the label from the logits when absent. Throws ConsistencyError
/// when both are given and disagree, NumericError on a non-finite logit,
/// ArgumentError when neither is given or an id is empty.
PredictionRecord make_record(std::string example_id, std::string model_id, std::optional<Logits> logits,
                             std::optional<LabelClass> label);

/// Complete models x examples grid; labels are stored model-major.
class PredictionMatrix {
public:
    PredictionMatrix() = default;

    std::size_t num_models() const noexcept { return m_model_ids.size(); }
    std::size_t num_examples() const noexcept { return m_example_ids.size(); }
    const std::vector<std::string>& model_ids() const noexcept { return m_model_ids; }
    const std::vector<std::string>& example_ids() const noexcept { return m_example_ids; }

    LabelClass label(std::size_t model, std::size_t example) const {
        return m_labels[model * m_example_ids.size() + example];
    }
    /// One model's labels over all examples.
    std::span<const LabelClass> row(std::size_t model) const {
        return std::span<const LabelClass>(m_labels).subspan(model * m_example_ids.size(), m_example_ids.size());
    }
    /// All models' votes on one example, in model order.
    std::vector<LabelClass> column(std::size_t example) const;

    /// True when every cell carries logits.
    bool has_logits() const noexcept { return !m_logits.empty(); }
    const Logits& logits(std::size_t model, std::size_t example) const {
        return m_logits.at(model * m_example_ids.size() + example);
    }

    /// Sub-matrix over the given model indices, in the given order.
    PredictionMatrix select_models(std::span<const std::size_t> models) const;

    /// Index of a model id; throws ArgumentError if absent.
    std::size_t model_index(std::string_view model_id) const;

    bool operator==(const PredictionMatrix&) const = default;

    friend PredictionMatrix assemble_matrix(std::span<const PredictionRecord>, std::span<const std::string>,
                                            std::span<const std::string>);

private:
    std::vector<std::string> m_model_ids;
    std::vector<std::string> m_example_ids;
    std::vector<LabelClass> m_labels;
    std::vector<Logits> m_logits;
};

/// Parses the predictions wire format (JSON lines). Validates each record
/// but not referential integrity. Throws ParseError with the line number.
std::vector<PredictionRecord> parse_predictions(std::string_view content);

/// Reads and validates a predictions file against the split it describes.
/// All-or-nothing: any error throws and nothing is returned.
///
/// Errors: IoError, ParseError, ConsistencyError, ReferentialError (lists
/// every unknown example_id), DuplicationError.
std::vector<PredictionRecord> import_predictions(const std::filesystem::path& path,
                                                 const DatasetSplit& expected_examples);

/// Same checks on already-parsed records.
void validate_predictions(std::span<const PredictionRecord> records, const DatasetSplit& expected_examples);

/// Serializes one record exactly as the wire format prescribes:
/// {"example_id":..,"model_id":..,"logits":[..],"label":n} without spaces,
/// logits printed with shortest round-trip precision.
std::string record_to_json_line(const PredictionRecord& record);

void write_predictions(std::ostream& out, std::span<const PredictionRecord> records);
void write_predictions(const std::filesystem::path& path, std::span<const PredictionRecord> records);

/// Orders records into a matrix by the given model and example order.
/// Records for models outside `model_ids` are ignored. Throws
/// CompletenessError naming the first missing (model, example) cell in
/// model-major order, DuplicationError on a repeated cell, ReferentialError
/// on examples outside `example_ids`, ArgumentError on repeated ids.
PredictionMatrix assemble_matrix(std::span<const PredictionRecord> records, std::span<const std::string> model_ids,
                                 std::span<const std::string> example_ids);

PredictionMatrix assemble_matrix(std::span<const PredictionRecord> records, std::span<const std::string> model_ids,
                                 const DatasetSplit& split);

/// Flattens a matrix back into records, model-major.
std::vector<PredictionRecord> export_matrix(const PredictionMatrix& matrix);

} // namespace vitd

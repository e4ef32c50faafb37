#pragma once

#include "vitd/label.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vitd {

/// Rows are gold classes, columns predicted classes.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

    std::size_t total() const noexcept;
    std::size_t trace() const noexcept;
    bool is_diagonal() const noexcept;
};

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    ConfusionMatrix confusion;
    std::array<ClassScores, kNumClasses> per_class{};
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    std::size_t n = 0;
};

/// Scores predictions against gold labels. Precision, recall and F1 are 0
/// when undefined, and all three classes enter the macro mean whether or
/// not they occur. Throws ArgumentError on empty or misaligned input.
EvalReport evaluate(std::span<const LabelClass> pred, std::span<const LabelClass> gold);

/// Macro F1 straight from a confusion matrix (same conventions as evaluate).
double macro_f1(const ConfusionMatrix& confusion);

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
};

/// 95% percentile bootstrap interval of macro F1 over example resampling.
/// Percentiles use linear interpolation between order statistics.
ConfidenceInterval bootstrap_ci(std::span<const LabelClass> pred, std::span<const LabelClass> gold,
                                std::size_t resamples = 1000, std::uint64_t seed = 0);

std::string report_to_json(const EvalReport& report, int indent = 2);

/// One row of a score table: model, approach, macro F1.
struct ScoreRow {
    std::string model;
    std::string approach;
    double macro_f1 = 0.0;
};

/// Aligned text table with Model / Approach / Macro F1 columns; rows after
/// `separator_before` are set off by a rule (the ensemble rows).
void render_score_table(std::ostream& out, std::span<const ScoreRow> rows,
                        std::optional<std::size_t> separator_before = std::nullopt);

/// Per-class precision / recall / F1 block plus the confusion matrix.
void render_report(std::ostream& out, const EvalReport& report);

} // namespace vitd

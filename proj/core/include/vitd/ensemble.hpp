#pragma once

#include "vitd/label.hpp"
#include "vitd/prediction_store.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vitd {

/// Model indices, highest priority first. Must be a permutation of 0..M-1.
using PriorityOrder = std::vector<std::size_t>;

/// 0, 1, ..., M-1.
PriorityOrder default_priority(std::size_t num_models);

/// Resolves model ids to a PriorityOrder over `model_ids`. An empty list
/// yields the default order. Throws ArgumentError unless `priority` is a
/// permutation of `model_ids`.
PriorityOrder resolve_priority(std::span<const std::string> priority, std::span<const std::string> model_ids);

/// Mode of the votes. Ties go to the vote of the highest-priority model
/// among those that voted for one of the tied labels.
LabelClass hard_vote(std::span<const LabelClass> votes, std::span<const std::size_t> priority);

/// Relative tolerance under which two weighted scores count as tied.
inline constexpr double kScoreTieTolerance = 1e-12;

/// score(c) = sum of weights of models voting c; returns the argmax. Scores
/// within kScoreTieTolerance * sum(weights) of the maximum are tied and
/// resolved by the hard-vote priority rule restricted to the tied labels.
/// Throws ArgumentError on negative, non-finite or all-zero weights, or a
/// size mismatch.
LabelClass weighted_vote(std::span<const LabelClass> votes, std::span<const double> weights,
                         std::span<const std::size_t> priority);

/// Non-negative per-model weights keyed by model id.
class WeightVector {
public:
    WeightVector() = default;
    /// Throws ArgumentError on size mismatch, duplicate ids, negative or
    /// non-finite weights, or when no weight is positive.
    WeightVector(std::vector<std::string> model_ids, std::vector<double> weights);

    const std::vector<std::string>& model_ids() const noexcept { return m_model_ids; }
    const std::vector<double>& weights() const noexcept { return m_weights; }

    /// Copy scaled so the weights sum to 1.
    WeightVector normalized() const;

    /// Weights reordered to `model_ids`. Throws ArgumentError unless this
    /// vector covers exactly those ids.
    std::vector<double> aligned_to(std::span<const std::string> model_ids) const;

    std::string to_json(int indent = 2) const;
    static WeightVector from_json(std::string_view text);

    bool operator==(const WeightVector&) const = default;

private:
    std::vector<std::string> m_model_ids;
    std::vector<double> m_weights;
};

enum class VoteMode { Hard, Weighted };

std::optional<VoteMode> parse_vote_mode(std::string_view name) noexcept;
std::string_view vote_mode_name(VoteMode mode) noexcept;

struct EnsembleConfig {
    /// Model ids, highest priority first; empty means matrix order.
    std::vector<std::string> priority_order;
    VoteMode mode = VoteMode::Hard;
};

struct VoteBreakdown {
    std::vector<LabelClass> votes; // model order
    LabelClass winner = LabelClass::NonViolence;
    /// Vote count (hard) or normalized weight mass (weighted) of the winner.
    double winning_score = 0.0;
};

struct EnsembleOutput {
    std::vector<LabelClass> labels;
    std::vector<VoteBreakdown> breakdown;
};

/// Votes every example of the matrix independently. `weights` must be given
/// exactly when config.mode is Weighted (ArgumentError otherwise).
EnsembleOutput ensemble_predict(const PredictionMatrix& matrix, const EnsembleConfig& config,
                                const std::optional<WeightVector>& weights = std::nullopt);

struct WeightSearchResult {
    WeightVector best_weights;
    double best_dev_macro_f1 = 0.0;
    /// Grid step is 1 / grid_denominator.
    std::uint32_t grid_denominator = 20;
    std::size_t evaluations = 0;
    double uniform_dev_macro_f1 = 0.0;

    std::string to_json(int indent = 2) const;
    static WeightSearchResult from_json(std::string_view text);
};

/// Number of weight vectors with entries in {0, 1/q, ..., 1} summing to 1
/// over M models: C(q + M - 1, M - 1). Saturates at SIZE_MAX.
std::size_t simplex_grid_size(std::size_t num_models, std::uint32_t denominator);

struct SearchOptions {
    std::uint32_t grid_denominator = 20;
    std::size_t threads = 1;
    /// Refuse grids larger than this many points.
    std::size_t max_points = 5'000'000;
};

/// Exhaustive simplex grid search for the weights maximizing dev macro F1
/// under weighted_vote. When q is not a multiple of M the exact uniform
/// vector is evaluated as one extra candidate, so the result never scores
/// below uniform weighting. F1 values within 1e-12 of the best are ties,
/// settled by smaller distance to uniform and then by the lexicographically
/// smallest weight tuple; the result does not depend on `threads`.
///
/// Throws ArgumentError when gold is empty or misaligned, q is 0, or the
/// grid exceeds max_points.
WeightSearchResult search_weights(const PredictionMatrix& matrix_dev, std::span<const LabelClass> gold_dev,
                                  std::span<const std::size_t> priority, const SearchOptions& options = {});

struct SubsetRow {
    std::vector<std::string> models; // matrix order
    double macro_f1 = 0.0;
};

inline constexpr std::size_t kMaxSubsetModels = 20;

/// Hard-vote macro F1 for each of the 2^M - 1 non-empty model subsets, with
/// the priority order restricted to the subset. Sorted by F1 descending,
/// then subset size ascending, then by model indices lexicographically.
/// Throws ArgumentError when M > 20 or gold is misaligned.
std::vector<SubsetRow> subset_ensembles(const PredictionMatrix& matrix, std::span<const LabelClass> gold,
                                        std::span<const std::size_t> priority);

void write_subset_csv(std::ostream& out, std::span<const SubsetRow> rows);
void render_subset_table(std::ostream& out, std::span<const SubsetRow> rows);

/// Row-major M x M; cell (i, j) is the fraction of examples on which models
/// i and j agree. With no examples every cell is 1.
std::vector<double> agreement_matrix(const PredictionMatrix& matrix);

} // namespace vitd

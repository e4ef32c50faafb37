#include "vitd/ensemble.hpp"

#include "vitd/error.hpp"
#include "vitd/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace vitd {
namespace {

void check_priority(std::span<const std::size_t> priority, std::size_t num_models) {
    if (priority.size() != num_models) {
        throw ArgumentError("priority order has " + std::to_string(priority.size()) + " entries for " +
                            std::to_string(num_models) + " models");
    }
}

// Vote of the highest-priority model whose label is in `tied`.
LabelClass break_tie(std::span<const LabelClass> votes, std::span<const std::size_t> priority,
                     const std::array<bool, kNumClasses>& tied) {
    for (std::size_t model : priority) {
        if (model >= votes.size()) throw ArgumentError("priority index out of range");
        if (tied[label_index(votes[model])]) return votes[model];
    }
    throw ArgumentError("priority order does not cover the voting models");
}

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

// All compositions of q into m non-negative parts, lexicographic order, flattened.
std::vector<std::uint32_t> enumerate_compositions(std::size_t m, std::uint32_t q) {
    std::vector<std::uint32_t> out;
    std::vector<std::uint32_t> current(m, 0);
    auto fill = [&](auto&& self, std::size_t pos, std::uint32_t remaining) -> void {
        if (pos + 1 == m) {
            current[pos] = remaining;
            out.insert(out.end(), current.begin(), current.end());
            return;
        }
        for (std::uint32_t v = 0; v <= remaining; ++v) {
            current[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    fill(fill, 0, q);
    return out;
}

double weighted_macro_f1(const std::vector<std::vector<LabelClass>>& columns, std::span<const LabelClass> gold,
                         std::span<const double> weights, std::span<const std::size_t> priority) {
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const LabelClass pred = weighted_vote(columns[i], weights, priority);
        ++cm.counts[label_index(gold[i])][label_index(pred)];
    }
    return macro_f1(cm);
}

} // namespace

PriorityOrder default_priority(std::size_t num_models) {
    PriorityOrder order(num_models);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return order;
}

PriorityOrder resolve_priority(std::span<const std::string> priority, std::span<const std::string> model_ids) {
    if (priority.empty()) return default_priority(model_ids.size());
    if (priority.size() != model_ids.size()) {
        throw ArgumentError("priority order must list each of the " + std::to_string(model_ids.size()) +
                            " models exactly once");
    }
    PriorityOrder order;
    std::vector<bool> used(model_ids.size(), false);
    for (const auto& id : priority) {
        auto it = std::find(model_ids.begin(), model_ids.end(), id);
        if (it == model_ids.end()) throw ArgumentError("priority order names unknown model '" + id + "'");
        const auto index = static_cast<std::size_t>(it - model_ids.begin());
        if (used[index]) throw ArgumentError("priority order repeats model '" + id + "'");
        used[index] = true;
        order.push_back(index);
    }
    return order;
}

LabelClass hard_vote(std::span<const LabelClass> votes, std::span<const std::size_t> priority) {
    if (votes.empty()) throw ArgumentError("hard_vote needs at least one vote");
    check_priority(priority, votes.size());

    std::array<std::size_t, kNumClasses> counts{};
    for (LabelClass v : votes) ++counts[label_index(v)];
    const std::size_t best = *std::max_element(counts.begin(), counts.end());

    std::array<bool, kNumClasses> tied{};
    std::size_t num_tied = 0;
    std::size_t winner = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        if (counts[c] == best) {
            tied[c] = true;
            ++num_tied;
            winner = c;
        }
    }
    if (num_tied == 1) return static_cast<LabelClass>(winner);
    return break_tie(votes, priority, tied);
}

LabelClass weighted_vote(std::span<const LabelClass> votes, std::span<const double> weights,
                         std::span<const std::size_t> priority) {
    if (votes.empty()) throw ArgumentError("weighted_vote needs at least one vote");
    if (weights.size() != votes.size()) throw ArgumentError("weighted_vote: weights/votes size mismatch");
    check_priority(priority, votes.size());

    std::array<double, kNumClasses> scores{};
    double total = 0.0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        const double w = weights[i];
        if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("weights must be finite and non-negative");
        scores[label_index(votes[i])] += w;
        total += w;
    }
    if (!(total > 0.0)) throw ArgumentError("at least one weight must be positive");

    const double best = *std::max_element(scores.begin(), scores.end());
    const double tolerance = kScoreTieTolerance * total;
    std::array<bool, kNumClasses> tied{};
    std::size_t num_tied = 0;
    std::size_t winner = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        if (best - scores[c] <= tolerance) {
            tied[c] = true;
            ++num_tied;
            winner = c;
        }
    }
    if (num_tied == 1) return static_cast<LabelClass>(winner);
    return break_tie(votes, priority, tied);
}

WeightVector::WeightVector(std::vector<std::string> model_ids, std::vector<double> weights)
    : m_model_ids(std::move(model_ids)), m_weights(std::move(weights)) {
    if (m_model_ids.size() != m_weights.size()) throw ArgumentError("weight vector: ids/weights size mismatch");
    std::unordered_set<std::string> seen;
    double total = 0.0;
    for (std::size_t i = 0; i < m_weights.size(); ++i) {
        if (!seen.insert(m_model_ids[i]).second) throw ArgumentError("weight vector repeats model '" + m_model_ids[i] + "'");
        if (!(m_weights[i] >= 0.0) || !std::isfinite(m_weights[i])) {
            throw ArgumentError("weight for '" + m_model_ids[i] + "' must be finite and non-negative");
        }
        total += m_weights[i];
    }
    if (!(total > 0.0)) throw ArgumentError("weight vector needs at least one positive weight");
}

WeightVector WeightVector::normalized() const {
    const double total = std::accumulate(m_weights.begin(), m_weights.end(), 0.0);
    std::vector<double> w(m_weights);
    for (double& v : w) v /= total;
    return WeightVector(m_model_ids, std::move(w));
}

std::vector<double> WeightVector::aligned_to(std::span<const std::string> model_ids) const {
    if (model_ids.size() != m_model_ids.size()) {
        throw ArgumentError("weight vector covers " + std::to_string(m_model_ids.size()) + " models, expected " +
                            std::to_string(model_ids.size()));
    }
    std::vector<double> out;
    out.reserve(model_ids.size());
    for (const auto& id : model_ids) {
        auto it = std::find(m_model_ids.begin(), m_model_ids.end(), id);
        if (it == m_model_ids.end()) throw ArgumentError("weight vector has no weight for model '" + id + "'");
        out.push_back(m_weights[static_cast<std::size_t>(it - m_model_ids.begin())]);
    }
    return out;
}

std::string WeightVector::to_json(int indent) const {
    nlohmann::ordered_json weights = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < m_model_ids.size(); ++i) weights[m_model_ids[i]] = m_weights[i];
    nlohmann::ordered_json j;
    j["weights"] = weights;
    return j.dump(indent);
}

WeightVector WeightVector::from_json(std::string_view text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, std::string("invalid weights JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("weights") || !j["weights"].is_object()) {
        throw ParseError(0, "weights JSON needs an object field 'weights'");
    }
    std::vector<std::string> ids;
    std::vector<double> weights;
    for (const auto& [id, value] : j["weights"].items()) {
        if (!value.is_number()) throw ParseError(0, "weight for '" + id + "' is not a number");
        ids.push_back(id);
        weights.push_back(value.get<double>());
    }
    return WeightVector(std::move(ids), std::move(weights));
}

std::optional<VoteMode> parse_vote_mode(std::string_view name) noexcept {
    if (name == "hard") return VoteMode::Hard;
    if (name == "weighted") return VoteMode::Weighted;
    return std::nullopt;
}

std::string_view vote_mode_name(VoteMode mode) noexcept { return mode == VoteMode::Hard ? "hard" : "weighted"; }

EnsembleOutput ensemble_predict(const PredictionMatrix& matrix, const EnsembleConfig& config,
                                const std::optional<WeightVector>& weights) {
    if (matrix.num_models() == 0) throw ArgumentError("ensemble needs at least one model");
    const bool weighted = config.mode == VoteMode::Weighted;
    if (weighted && !weights) throw ArgumentError("weighted mode requires a weight vector");
    if (!weighted && weights) throw ArgumentError("hard mode does not take a weight vector");

    const PriorityOrder priority = resolve_priority(config.priority_order, matrix.model_ids());
    std::vector<double> w;
    double total = 0.0;
    if (weighted) {
        w = weights->aligned_to(matrix.model_ids());
        total = std::accumulate(w.begin(), w.end(), 0.0);
    }

    EnsembleOutput out;
    out.labels.reserve(matrix.num_examples());
    out.breakdown.reserve(matrix.num_examples());
    for (std::size_t i = 0; i < matrix.num_examples(); ++i) {
        VoteBreakdown b;
        b.votes = matrix.column(i);
        b.winner = weighted ? weighted_vote(b.votes, w, priority) : hard_vote(b.votes, priority);
        for (std::size_t m = 0; m < b.votes.size(); ++m) {
            if (b.votes[m] == b.winner) b.winning_score += weighted ? w[m] : 1.0;
        }
        if (weighted) b.winning_score /= total;
        out.labels.push_back(b.winner);
        out.breakdown.push_back(std::move(b));
    }
    return out;
}

std::size_t simplex_grid_size(std::size_t num_models, std::uint32_t denominator) {
    if (num_models == 0) return 0;
    // C(q + M - 1, M - 1) built incrementally; each partial product is itself a binomial.
    const std::size_t k = num_models - 1;
    constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
    std::size_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t factor = denominator + i;
        if (result > kMax / factor) return kMax;
        result = result * factor / i;
    }
    return result;
}

WeightSearchResult search_weights(const PredictionMatrix& matrix_dev, std::span<const LabelClass> gold_dev,
                                  std::span<const std::size_t> priority, const SearchOptions& options) {
    const std::size_t m = matrix_dev.num_models();
    const std::size_t n = matrix_dev.num_examples();
    if (m == 0) throw ArgumentError("weight search needs at least one model");
    if (gold_dev.empty() || gold_dev.size() != n) {
        throw ArgumentError("weight search needs dev gold labels aligned with the " + std::to_string(n) + " examples");
    }
    if (options.grid_denominator == 0) throw ArgumentError("grid step must be 1/q with q >= 1");
    check_priority(priority, m);

    const std::size_t grid_points = simplex_grid_size(m, options.grid_denominator);
    if (grid_points > options.max_points) {
        throw ArgumentError("weight grid has " + std::to_string(grid_points) + " points, limit is " +
                            std::to_string(options.max_points));
    }
    const std::uint32_t q = options.grid_denominator;
    const auto parts = enumerate_compositions(m, q);

    std::vector<std::vector<LabelClass>> columns(n);
    for (std::size_t i = 0; i < n; ++i) columns[i] = matrix_dev.column(i);

    std::vector<double> scores(grid_points, 0.0);
    auto evaluate_range = [&](std::size_t begin, std::size_t end) {
        std::vector<double> w(m);
        for (std::size_t p = begin; p < end; ++p) {
            // Integer weights: same argmax as parts/q, and ties stay exact.
            for (std::size_t k = 0; k < m; ++k) w[k] = static_cast<double>(parts[p * m + k]);
            scores[p] = weighted_macro_f1(columns, gold_dev, w, priority);
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(grid_points, 1));
    if (workers == 1) {
        evaluate_range(0, grid_points);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (grid_points + workers - 1) / workers;
        for (std::size_t begin = 0; begin < grid_points; begin += chunk) {
            pool.emplace_back(evaluate_range, begin, std::min(grid_points, begin + chunk));
        }
    }

    const std::vector<double> ones(m, 1.0);
    const double uniform_f1 = weighted_macro_f1(columns, gold_dev, ones, priority);
    const bool uniform_on_grid = q % m == 0;

    double best_f1 = *std::max_element(scores.begin(), scores.end());
    if (!uniform_on_grid) best_f1 = std::max(best_f1, uniform_f1);
    constexpr double kF1TieTolerance = 1e-12;

    // Candidate order: distance to uniform, then lexicographic weights.
    auto distance2 = [&](std::size_t p) {
        std::uint64_t d = 0;
        for (std::size_t k = 0; k < m; ++k) {
            const auto diff = static_cast<std::int64_t>(parts[p * m + k]) * static_cast<std::int64_t>(m) - q;
            d += static_cast<std::uint64_t>(diff * diff);
        }
        return d;
    };
    auto better = [&](std::size_t a, std::size_t b) {
        const auto da = distance2(a);
        const auto db = distance2(b);
        if (da != db) return da < db;
        return std::lexicographical_compare(parts.begin() + static_cast<std::ptrdiff_t>(a * m),
                                            parts.begin() + static_cast<std::ptrdiff_t>((a + 1) * m),
                                            parts.begin() + static_cast<std::ptrdiff_t>(b * m),
                                            parts.begin() + static_cast<std::ptrdiff_t>((b + 1) * m));
    };

    WeightSearchResult result;
    result.grid_denominator = q;
    result.evaluations = grid_points + (uniform_on_grid ? 0 : 1);
    result.uniform_dev_macro_f1 = uniform_f1;

    if (!uniform_on_grid && uniform_f1 >= best_f1 - kF1TieTolerance) {
        // Off-grid uniform point: distance zero beats every grid point.
        result.best_weights = WeightVector(matrix_dev.model_ids(), std::vector<double>(m, 1.0 / static_cast<double>(m)));
        result.best_dev_macro_f1 = uniform_f1;
        return result;
    }

    std::optional<std::size_t> best;
    for (std::size_t p = 0; p < grid_points; ++p) {
        if (scores[p] < best_f1 - kF1TieTolerance) continue;
        if (!best || better(p, *best)) best = p;
    }
    std::vector<double> weights(m);
    for (std::size_t k = 0; k < m; ++k) {
        weights[k] = static_cast<double>(parts[*best * m + k]) / static_cast<double>(q);
    }
    result.best_weights = WeightVector(matrix_dev.model_ids(), std::move(weights));
    result.best_dev_macro_f1 = scores[*best];
    return result;
}

std::string WeightSearchResult::to_json(int indent) const {
    nlohmann::ordered_json weights = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < best_weights.model_ids().size(); ++i) {
        weights[best_weights.model_ids()[i]] = best_weights.weights()[i];
    }
    nlohmann::ordered_json j;
    j["grid_step"] = "1/" + std::to_string(grid_denominator);
    j["grid_denominator"] = grid_denominator;
    j["evaluations"] = evaluations;
    j["best_dev_macro_f1"] = best_dev_macro_f1;
    j["uniform_dev_macro_f1"] = uniform_dev_macro_f1;
    j["weights"] = weights;
    return j.dump(indent);
}

WeightSearchResult WeightSearchResult::from_json(std::string_view text) {
    WeightSearchResult result;
    result.best_weights = WeightVector::from_json(text);
    const auto j = nlohmann::json::parse(text);
    result.grid_denominator = j.value("grid_denominator", 20u);
    result.evaluations = j.value("evaluations", std::size_t{0});
    result.best_dev_macro_f1 = j.value("best_dev_macro_f1", 0.0);
    result.uniform_dev_macro_f1 = j.value("uniform_dev_macro_f1", 0.0);
    return result;
}

std::vector<SubsetRow> subset_ensembles(const PredictionMatrix& matrix, std::span<const LabelClass> gold,
                                        std::span<const std::size_t> priority) {
    const std::size_t m = matrix.num_models();
    const std::size_t n = matrix.num_examples();
    if (m == 0) throw ArgumentError("subset exploration needs at least one model");
    if (m > kMaxSubsetModels) {
        throw ArgumentError("subset exploration is limited to " + std::to_string(kMaxSubsetModels) + " models, got " +
                            std::to_string(m));
    }
    if (gold.empty() || gold.size() != n) throw ArgumentError("subset exploration needs aligned gold labels");
    check_priority(priority, m);

    struct Scored {
        std::vector<std::size_t> members;
        double f1;
    };
    std::vector<Scored> scored;
    scored.reserve((std::size_t{1} << m) - 1);

    std::vector<LabelClass> votes;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        std::vector<std::size_t> members;
        std::vector<std::size_t> local(m, 0);
        for (std::size_t k = 0; k < m; ++k) {
            if (mask & (1u << k)) {
                local[k] = members.size();
                members.push_back(k);
            }
        }
        PriorityOrder sub_priority;
        for (std::size_t model : priority) {
            if (mask & (1u << model)) sub_priority.push_back(local[model]);
        }

        ConfusionMatrix cm;
        votes.resize(members.size());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t s = 0; s < members.size(); ++s) votes[s] = matrix.label(members[s], i);
            ++cm.counts[label_index(gold[i])][label_index(hard_vote(votes, sub_priority))];
        }
        scored.push_back({std::move(members), macro_f1(cm)});
    }

    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.f1 != b.f1) return a.f1 > b.f1;
        if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
        return a.members < b.members;
    });

    std::vector<SubsetRow> rows;
    rows.reserve(scored.size());
    for (const auto& s : scored) {
        SubsetRow row;
        for (std::size_t k : s.members) row.models.push_back(matrix.model_ids()[k]);
        row.macro_f1 = s.f1;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_subset_csv(std::ostream& out, std::span<const SubsetRow> rows) {
    out << "rank,size,models,macro_f1\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::string joined;
        for (const auto& id : rows[r].models) {
            if (!joined.empty()) joined += '+';
            joined += id;
        }
        const bool quote = joined.find_first_of(",\"\n") != std::string::npos;
        if (quote) {
            std::string escaped = "\"";
            for (char c : joined) {
                if (c == '"') escaped += '"';
                escaped += c;
            }
            joined = escaped + "\"";
        }
        out << (r + 1) << ',' << rows[r].models.size() << ',' << joined << ',' << shortest(rows[r].macro_f1) << '\n';
    }
}

void render_subset_table(std::ostream& out, std::span<const SubsetRow> rows) {
    std::vector<std::string> names;
    std::size_t width = std::string_view("Models").size();
    for (const auto& row : rows) {
        std::string joined;
        for (const auto& id : row.models) {
            if (!joined.empty()) joined += " + ";
            joined += id;
        }
        width = std::max(width, joined.size());
        names.push_back(std::move(joined));
    }
    out << std::right << std::setw(4) << "Rank" << "  " << std::setw(4) << "Size" << "  " << std::left
        << std::setw(static_cast<int>(width)) << "Models" << "  " << "Macro F1" << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << std::right << std::setw(4) << (r + 1) << "  " << std::setw(4) << rows[r].models.size() << "  "
            << std::left << std::setw(static_cast<int>(width)) << names[r] << "  " << std::fixed
            << std::setprecision(4) << rows[r].macro_f1 << '\n';
    }
    out.unsetf(std::ios::floatfield);
}

std::vector<double> agreement_matrix(const PredictionMatrix& matrix) {
    const std::size_t m = matrix.num_models();
    const std::size_t n = matrix.num_examples();
    std::vector<double> out(m * m, 1.0);
    if (n == 0) return out;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            std::size_t same = 0;
            const auto ra = matrix.row(a);
            const auto rb = matrix.row(b);
            for (std::size_t i = 0; i < n; ++i) same += ra[i] == rb[i] ? 1 : 0;
            const double frac = static_cast<double>(same) / static_cast<double>(n);
            out[a * m + b] = frac;
            out[b * m + a] = frac;
        }
    }
    return out;
}

} // namespace vitd

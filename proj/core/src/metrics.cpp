#include "vitd/metrics.hpp"

#include "vitd/error.hpp"
#include "vitd/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace vitd {
namespace {

ClassScores class_scores(const ConfusionMatrix& cm, std::size_t c) {
    std::size_t tp = cm.counts[c][c];
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        if (k == c) continue;
        fp += cm.counts[k][c];
        fn += cm.counts[c][k];
    }
    ClassScores s;
    if (tp + fp > 0) s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

void check_aligned(std::span<const LabelClass> pred, std::span<const LabelClass> gold) {
    if (pred.size() != gold.size()) {
        throw ArgumentError("prediction/gold length mismatch: " + std::to_string(pred.size()) + " vs " +
                            std::to_string(gold.size()));
    }
    if (pred.empty()) throw ArgumentError("cannot evaluate zero examples");
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

double percentile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

std::size_t ConfusionMatrix::total() const noexcept {
    std::size_t t = 0;
    for (const auto& row : counts)
        for (std::size_t v : row) t += v;
    return t;
}

std::size_t ConfusionMatrix::trace() const noexcept {
    std::size_t t = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) t += counts[c][c];
    return t;
}

bool ConfusionMatrix::is_diagonal() const noexcept { return trace() == total(); }

double macro_f1(const ConfusionMatrix& confusion) {
    double sum = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) sum += class_scores(confusion, c).f1;
    return sum / static_cast<double>(kNumClasses);
}

EvalReport evaluate(std::span<const LabelClass> pred, std::span<const LabelClass> gold) {
    check_aligned(pred, gold);
    EvalReport report;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ++report.confusion.counts[label_index(gold[i])][label_index(pred[i])];
    }
    report.n = pred.size();
    double sum = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        report.per_class[c] = class_scores(report.confusion, c);
        sum += report.per_class[c].f1;
    }
    report.macro_f1 = sum / static_cast<double>(kNumClasses);
    report.accuracy = static_cast<double>(report.confusion.trace()) / static_cast<double>(report.n);
    return report;
}

ConfidenceInterval bootstrap_ci(std::span<const LabelClass> pred, std::span<const LabelClass> gold,
                                std::size_t resamples, std::uint64_t seed) {
    check_aligned(pred, gold);
    if (resamples == 0) throw ArgumentError("bootstrap needs at least one resample");

    DeterministicRng rng(seed);
    const std::size_t n = pred.size();
    std::vector<double> scores;
    scores.reserve(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        ConfusionMatrix cm;
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = static_cast<std::size_t>(rng.uniform_below(n));
            ++cm.counts[label_index(gold[j])][label_index(pred[j])];
        }
        scores.push_back(macro_f1(cm));
    }
    std::sort(scores.begin(), scores.end());
    return {percentile(scores, 0.025), percentile(scores, 0.975)};
}

std::string report_to_json(const EvalReport& report, int indent) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["macro_f1"] = report.macro_f1;
    j["accuracy"] = report.accuracy;
    nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
    for (LabelClass c : kAllLabels) {
        const auto& s = report.per_class[label_index(c)];
        per_class[std::to_string(label_code(c))] = {
            {"name", label_name(c)}, {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
    }
    j["per_class"] = per_class;
    j["confusion"] = report.confusion.counts;
    return j.dump(indent);
}

void render_score_table(std::ostream& out, std::span<const ScoreRow> rows,
                        std::optional<std::size_t> separator_before) {
    std::size_t model_w = std::string_view("Model").size();
    std::size_t approach_w = std::string_view("Approach").size();
    for (const auto& r : rows) {
        model_w = std::max(model_w, r.model.size());
        approach_w = std::max(approach_w, r.approach.size());
    }
    const std::string f1_head = "Macro F1";
    const std::string rule = "+" + std::string(model_w + 2, '-') + "+" + std::string(approach_w + 2, '-') + "+" +
                             std::string(f1_head.size() + 2, '-') + "+\n";

    auto line = [&](const std::string& a, const std::string& b, const std::string& c) {
        out << "| " << std::left << std::setw(static_cast<int>(model_w)) << a << " | "
            << std::setw(static_cast<int>(approach_w)) << b << " | " << std::right
            << std::setw(static_cast<int>(f1_head.size())) << c << " |\n";
    };

    out << rule;
    line("Model", "Approach", f1_head);
    out << rule;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (separator_before && *separator_before == i && i > 0) out << rule;
        line(rows[i].model, rows[i].approach, fixed(rows[i].macro_f1, 3));
    }
    out << rule;
}

void render_report(std::ostream& out, const EvalReport& report) {
    out << "n = " << report.n << "  accuracy = " << fixed(report.accuracy, 4)
        << "  macro F1 = " << fixed(report.macro_f1, 4) << "\n\n";
    out << std::left << std::setw(18) << "class" << std::right << std::setw(10) << "precision" << std::setw(10)
        << "recall" << std::setw(10) << "f1" << "\n";
    for (LabelClass c : kAllLabels) {
        const auto& s = report.per_class[label_index(c)];
        out << std::left << std::setw(18) << (std::to_string(label_code(c)) + " " + std::string(label_name(c)))
            << std::right << std::setw(10) << fixed(s.precision, 4) << std::setw(10) << fixed(s.recall, 4)
            << std::setw(10) << fixed(s.f1, 4) << "\n";
    }
    out << "\nconfusion (rows gold, columns predicted)\n";
    for (const auto& row : report.confusion.counts) {
        for (std::size_t v : row) out << std::setw(8) << v;
        out << "\n";
    }
}

} // namespace vitd

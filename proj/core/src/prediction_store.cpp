#include "vitd/prediction_store.hpp"

#include "vitd/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace vitd {
namespace {

struct PairHash {
    std::size_t operator()(const std::pair<std::string, std::string>& p) const noexcept {
        const std::size_t a = std::hash<std::string>{}(p.first);
        return a ^ (std::hash<std::string>{}(p.second) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    }
};

std::string cell_name(const PredictionRecord& r) {
    return "(model '" + r.model_id + "', example '" + r.example_id + "')";
}

PredictionRecord parse_record(const nlohmann::json& obj, std::size_t line) {
    if (!obj.is_object()) throw ParseError(line, "expected a JSON object");

    auto string_field = [&](const char* name) {
        auto it = obj.find(name);
        if (it == obj.end() || !it->is_string()) throw ParseError(line, std::string("missing string field '") + name + "'");
        return it->get<std::string>();
    };
    std::string example_id = string_field("example_id");
    std::string model_id = string_field("model_id");

    std::optional<Logits> logits;
    if (auto it = obj.find("logits"); it != obj.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != kNumClasses) {
            throw ParseError(line, "'logits' must be an array of " + std::to_string(kNumClasses) + " numbers");
        }
        Logits values{};
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            if (!(*it)[k].is_number()) throw ParseError(line, "'logits' must contain numbers");
            values[k] = (*it)[k].get<double>();
        }
        logits = values;
    }

    std::optional<LabelClass> label;
    if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw ParseError(line, "'label' must be an integer 0, 1 or 2");
        label = label_from_code(it->get<long long>());
        if (!label) throw ParseError(line, "label " + it->dump() + " outside {0,1,2}");
    }

    try {
        return make_record(std::move(example_id), std::move(model_id), logits, label);
    } catch (const ConsistencyError& e) {
        throw ConsistencyError("line " + std::to_string(line) + ": " + e.what());
    } catch (const NumericError& e) {
        throw ParseError(line, e.what());
    } catch (const ArgumentError& e) {
        throw ParseError(line, e.what());
    }
}

} // namespace

LabelClass argmax_label(const Logits& logits) noexcept {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kNumClasses; ++k) {
        if (logits[k] > logits[best]) best = k;
    }
    return static_cast<LabelClass>(best);
}

PredictionRecord make_record(std::string example_id, std::string model_id, std::optional<Logits> logits,
                             std::optional<LabelClass> label) {
    if (example_id.empty()) throw ArgumentError("empty example_id");
    if (model_id.empty()) throw ArgumentError("empty model_id");
    if (!logits && !label) throw ArgumentError("record needs logits or a label");

    PredictionRecord record{std::move(example_id), std::move(model_id), logits, LabelClass::NonViolence};
    if (logits) {
        for (double v : *logits) {
            if (!std::isfinite(v)) throw NumericError("non-finite logit for " + cell_name(record));
        }
        const LabelClass derived = argmax_label(*logits);
        if (label && *label != derived) {
            throw ConsistencyError("label " + std::to_string(label_code(*label)) + " disagrees with logits argmax " +
                                   std::to_string(label_code(derived)) + " for " + cell_name(record));
        }
        record.label = derived;
    } else {
        record.label = *label;
    }
    return record;
}

std::vector<LabelClass> PredictionMatrix::column(std::size_t example) const {
    std::vector<LabelClass> votes(num_models());
    for (std::size_t m = 0; m < num_models(); ++m) votes[m] = label(m, example);
    return votes;
}

PredictionMatrix PredictionMatrix::select_models(std::span<const std::size_t> models) const {
    PredictionMatrix out;
    out.m_example_ids = m_example_ids;
    const std::size_t n = num_examples();
    for (std::size_t m : models) {
        if (m >= num_models()) throw ArgumentError("model index out of range");
        out.m_model_ids.push_back(m_model_ids[m]);
        const auto r = row(m);
        out.m_labels.insert(out.m_labels.end(), r.begin(), r.end());
        if (has_logits()) {
            out.m_logits.insert(out.m_logits.end(), m_logits.begin() + static_cast<std::ptrdiff_t>(m * n),
                                m_logits.begin() + static_cast<std::ptrdiff_t>((m + 1) * n));
        }
    }
    return out;
}

std::size_t PredictionMatrix::model_index(std::string_view model_id) const {
    for (std::size_t m = 0; m < m_model_ids.size(); ++m) {
        if (m_model_ids[m] == model_id) return m;
    }
    throw ArgumentError("unknown model_id '" + std::string(model_id) + "'");
}

std::vector<PredictionRecord> parse_predictions(std::string_view content) {
    std::vector<PredictionRecord> records;
    std::size_t line = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        ++line;
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string_view::npos) eol = content.size();
        std::string_view text = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (text.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(line, std::string("invalid JSON: ") + e.what());
        }
        records.push_back(parse_record(obj, line));
    }
    return records;
}

void validate_predictions(std::span<const PredictionRecord> records, const DatasetSplit& expected_examples) {
    std::unordered_set<std::string> known;
    for (const auto& ex : expected_examples.examples()) known.insert(ex.id);

    std::vector<std::string> offenders;
    std::unordered_set<std::string> reported;
    for (const auto& r : records) {
        if (!known.contains(r.example_id) && reported.insert(r.example_id).second) offenders.push_back(r.example_id);
    }
    if (!offenders.empty()) throw ReferentialError(std::move(offenders));

    std::unordered_set<std::pair<std::string, std::string>, PairHash> cells;
    for (const auto& r : records) {
        if (!cells.insert({r.model_id, r.example_id}).second) {
            throw DuplicationError("duplicate prediction for " + cell_name(r));
        }
    }
}

std::vector<PredictionRecord> import_predictions(const std::filesystem::path& path,
                                                 const DatasetSplit& expected_examples) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open predictions file");
    const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(path.string(), "read failed");

    auto records = parse_predictions(content);
    validate_predictions(records, expected_examples);
    return records;
}

std::string record_to_json_line(const PredictionRecord& record) {
    nlohmann::ordered_json obj;
    obj["example_id"] = record.example_id;
    obj["model_id"] = record.model_id;
    if (record.logits) obj["logits"] = *record.logits;
    obj["label"] = label_code(record.label);
    return obj.dump();
}

void write_predictions(std::ostream& out, std::span<const PredictionRecord> records) {
    for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

void write_predictions(const std::filesystem::path& path, std::span<const PredictionRecord> records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    write_predictions(out, records);
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

PredictionMatrix assemble_matrix(std::span<const PredictionRecord> records, std::span<const std::string> model_ids,
                                 std::span<const std::string> example_ids) {
    std::unordered_map<std::string, std::size_t> model_pos;
    for (std::size_t m = 0; m < model_ids.size(); ++m) {
        if (!model_pos.emplace(model_ids[m], m).second) throw ArgumentError("duplicate model_id '" + model_ids[m] + "'");
    }
    std::unordered_map<std::string, std::size_t> example_pos;
    for (std::size_t i = 0; i < example_ids.size(); ++i) {
        if (!example_pos.emplace(example_ids[i], i).second) {
            throw ArgumentError("duplicate example_id '" + example_ids[i] + "'");
        }
    }

    const std::size_t n = example_ids.size();
    std::vector<const PredictionRecord*> cells(model_ids.size() * n, nullptr);
    std::vector<std::string> unknown;
    for (const auto& r : records) {
        auto m = model_pos.find(r.model_id);
        if (m == model_pos.end()) continue;
        auto e = example_pos.find(r.example_id);
        if (e == example_pos.end()) {
            unknown.push_back(r.example_id);
            continue;
        }
        auto& slot = cells[m->second * n + e->second];
        if (slot != nullptr) throw DuplicationError("duplicate prediction for " + cell_name(r));
        slot = &r;
    }
    if (!unknown.empty()) throw ReferentialError(std::move(unknown));

    PredictionMatrix matrix;
    matrix.m_model_ids.assign(model_ids.begin(), model_ids.end());
    matrix.m_example_ids.assign(example_ids.begin(), example_ids.end());
    matrix.m_labels.reserve(cells.size());
    bool all_logits = !cells.empty();
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] == nullptr) throw CompletenessError(model_ids[c / n], example_ids[c % n]);
        matrix.m_labels.push_back(cells[c]->label);
        all_logits = all_logits && cells[c]->logits.has_value();
    }
    if (all_logits) {
        matrix.m_logits.reserve(cells.size());
        for (const auto* r : cells) matrix.m_logits.push_back(*r->logits);
    }
    return matrix;
}

PredictionMatrix assemble_matrix(std::span<const PredictionRecord> records, std::span<const std::string> model_ids,
                                 const DatasetSplit& split) {
    const auto ids = split.ids();
    return assemble_matrix(records, model_ids, ids);
}

std::vector<PredictionRecord> export_matrix(const PredictionMatrix& matrix) {
    std::vector<PredictionRecord> records;
    records.reserve(matrix.num_models() * matrix.num_examples());
    for (std::size_t m = 0; m < matrix.num_models(); ++m) {
        for (std::size_t i = 0; i < matrix.num_examples(); ++i) {
            PredictionRecord r{matrix.example_ids()[i], matrix.model_ids()[m], std::nullopt, matrix.label(m, i)};
            if (matrix.has_logits()) r.logits = matrix.logits(m, i);
            records.push_back(std::move(r));
        }
    }
    return records;
}

} // namespace vitd

#include "config.hpp"

#include <vitd/hash.hpp>

#include <json.hpp>
#include <toml.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace vitd::cli {
namespace {

namespace fs = std::filesystem;

// Typed access to one TOML table that remembers which keys were read, so
// leftovers (typos) can be reported.
class TableReader {
public:
    TableReader(const toml::table& table, std::string where) : m_table(table), m_where(std::move(where)) {}

    bool has(const std::string& key) const { return m_table.contains(key); }

    std::optional<std::string> string(const std::string& key) {
        const toml::node* node = take(key);
        if (!node) return std::nullopt;
        if (auto v = node->value<std::string>(); v && node->is_string()) return *v;
        fail(key, "a string");
    }

    std::optional<std::int64_t> integer(const std::string& key) {
        const toml::node* node = take(key);
        if (!node) return std::nullopt;
        if (!node->is_integer()) fail(key, "an integer");
        return node->as_integer()->get();
    }

    std::optional<std::uint64_t> non_negative(const std::string& key) {
        auto v = integer(key);
        if (v && *v < 0) fail(key, "a non-negative integer");
        return v ? std::optional<std::uint64_t>(static_cast<std::uint64_t>(*v)) : std::nullopt;
    }

    std::optional<double> real(const std::string& key) {
        const toml::node* node = take(key);
        if (!node) return std::nullopt;
        if (node->is_floating_point()) return node->as_floating_point()->get();
        if (node->is_integer()) return static_cast<double>(node->as_integer()->get());
        fail(key, "a number");
    }

    std::optional<bool> boolean(const std::string& key) {
        const toml::node* node = take(key);
        if (!node) return std::nullopt;
        if (!node->is_boolean()) fail(key, "a boolean");
        return node->as_boolean()->get();
    }

    std::optional<std::vector<std::string>> strings(const std::string& key) {
        const toml::node* node = take(key);
        if (!node) return std::nullopt;
        const toml::array* arr = node->as_array();
        if (!arr) fail(key, "an array of strings");
        std::vector<std::string> out;
        for (const auto& item : *arr) {
            if (!item.is_string()) fail(key, "an array of strings");
            out.push_back(item.as_string()->get());
        }
        return out;
    }

    std::optional<NgramRange> range(const std::string& key) {
        const toml::node* node = take(key);
        if (!node) return std::nullopt;
        const toml::array* arr = node->as_array();
        if (!arr || arr->size() != 2 || !(*arr)[0].is_integer() || !(*arr)[1].is_integer()) {
            fail(key, "a [min, max] integer pair");
        }
        const auto lo = (*arr)[0].as_integer()->get();
        const auto hi = (*arr)[1].as_integer()->get();
        if (lo < 0 || hi < 0) fail(key, "a non-negative [min, max] pair");
        return NgramRange{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)};
    }

    const toml::table* table(const std::string& key) {
        const toml::node* node = take(key);
        if (!node) return nullptr;
        if (!node->is_table()) fail(key, "a table");
        return node->as_table();
    }

    const toml::array* array_of_tables(const std::string& key) {
        const toml::node* node = take(key);
        if (!node) return nullptr;
        if (!node->is_array_of_tables()) fail(key, "an array of tables");
        return node->as_array();
    }

    void finish() const {
        for (const auto& [key, node] : m_table) {
            const std::string name(key.str());
            if (!m_used.contains(name)) throw UsageError("config: unknown key '" + qualified(name) + "'");
        }
    }

private:
    const toml::node* take(const std::string& key) {
        m_used.insert(key);
        return m_table.get(key);
    }

    std::string qualified(const std::string& key) const { return m_where.empty() ? key : m_where + "." + key; }

    [[noreturn]] void fail(const std::string& key, const std::string& expected) const {
        throw UsageError("config: '" + qualified(key) + "' must be " + expected);
    }

    const toml::table& m_table;
    std::string m_where;
    std::set<std::string> m_used;
};

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(value);
    return p.is_absolute() ? p : (base / p).lexically_normal();
}

void require_file(const fs::path& path, const std::string& what) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw UsageError(what + ": file not found: " + path.string());
}

void check_id(const std::string& id, const std::string& where) {
    if (id.empty()) throw UsageError("config: " + where + " needs a non-empty 'id'");
    if (id.find_first_of("/\\\t\n") != std::string::npos || id == "." || id == "..") {
        throw UsageError("config: model id '" + id + "' may not contain path separators or whitespace control characters");
    }
}

TrainConfig read_train_config(TableReader& r, std::uint64_t global_seed, bool& explicit_seed) {
    TrainConfig tc;
    if (auto v = r.real("learning_rate")) tc.learning_rate = *v;
    if (auto v = r.integer("batch_size")) {
        if (*v < 1) throw UsageError("config: batch_size must be >= 1");
        tc.batch_size = static_cast<std::size_t>(*v);
    }
    if (auto v = r.integer("epochs")) {
        if (*v < 1) throw UsageError("config: epochs must be >= 1, got " + std::to_string(*v));
        tc.epochs = static_cast<std::size_t>(*v);
    }
    if (auto v = r.real("beta1")) tc.beta1 = *v;
    if (auto v = r.real("beta2")) tc.beta2 = *v;
    if (auto v = r.real("epsilon")) tc.epsilon = *v;
    if (auto v = r.real("weight_decay")) tc.weight_decay = *v;
    if (auto v = r.boolean("shuffle")) tc.shuffle = *v;
    auto seed = r.non_negative("seed");
    explicit_seed = seed.has_value();
    tc.seed = seed.value_or(global_seed);
    try {
        tc.validate();
    } catch (const ArgumentError& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    return tc;
}

nlohmann::ordered_json train_json(const TrainConfig& tc) {
    nlohmann::ordered_json j;
    j["learning_rate"] = tc.learning_rate;
    j["batch_size"] = tc.batch_size;
    j["epochs"] = tc.epochs;
    j["beta1"] = tc.beta1;
    j["beta2"] = tc.beta2;
    j["epsilon"] = tc.epsilon;
    j["weight_decay"] = tc.weight_decay;
    j["seed"] = tc.seed;
    j["shuffle"] = tc.shuffle;
    return j;
}

} // namespace

std::uint32_t parse_grid_step(const std::string& text) {
    std::string digits = text;
    if (text.starts_with("1/")) digits = text.substr(2);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw UsageError("grid step must look like 1/q, got '" + text + "'");
    }
    unsigned long q = 0;
    try {
        q = std::stoul(digits);
    } catch (const std::exception&) {
        throw UsageError("grid step '" + text + "' is out of range");
    }
    if (q < 1 || q > 100000) throw UsageError("grid step denominator must be in [1, 100000]");
    return static_cast<std::uint32_t>(q);
}

const ReferenceModel* ExperimentConfig::find_reference(const std::string& id) const {
    for (const auto& m : reference_models)
        if (m.id == id) return &m;
    return nullptr;
}

const ExternalModel* ExperimentConfig::find_external(const std::string& id) const {
    for (const auto& m : external_models)
        if (m.id == id) return &m;
    return nullptr;
}

std::filesystem::path ExperimentConfig::model_path(const std::string& id) const {
    return output_dir / "models" / (id + ".bin");
}

std::filesystem::path ExperimentConfig::training_log_path(const std::string& id) const {
    return output_dir / "models" / (id + ".log.jsonl");
}

std::filesystem::path ExperimentConfig::predictions_path(const std::string& model_id, const std::string& split) const {
    if (const auto* ext = find_external(model_id)) {
        if (auto it = ext->predictions.find(split); it != ext->predictions.end()) return it->second;
    }
    return output_dir / "predictions" / (model_id + "." + split + ".jsonl");
}

std::string ExperimentConfig::resolved_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["output_dir"] = output_dir.string();

    nlohmann::ordered_json data;
    data["format"] = std::string(data_format_name(format));
    for (const auto& [name, path] : splits) data[name] = path.string();
    data["schema"] = {{"id", schema.id}, {"text", schema.text}, {"label", schema.label},
                      {"allow_empty_text", schema.allow_empty_text}};
    j["data"] = data;

    j["featurizer"] = {{"hash", std::string(kFeatureHashName)},
                       {"dims_log2", featurizer.dims_log2},
                       {"word_ngrams", {featurizer.word_ngrams.min, featurizer.word_ngrams.max}},
                       {"char_ngrams", {featurizer.char_ngrams.min, featurizer.char_ngrams.max}},
                       {"hash_seed", featurizer.hash_seed},
                       {"tf_scaling", std::string(tf_scaling_name(featurizer.tf_scaling))}};

    nlohmann::ordered_json refs = nlohmann::ordered_json::array();
    for (const auto& m : reference_models) {
        nlohmann::ordered_json r;
        r["id"] = m.id;
        r["approach"] = m.approach;
        r["train"] = train_json(m.train);
        refs.push_back(r);
    }
    j["reference_models"] = refs;

    nlohmann::ordered_json exts = nlohmann::ordered_json::array();
    for (const auto& m : external_models) {
        nlohmann::ordered_json e;
        e["id"] = m.id;
        e["approach"] = m.approach;
        for (const auto& [split, path] : m.predictions) e[split] = path.string();
        exts.push_back(e);
    }
    j["external_models"] = exts;

    nlohmann::ordered_json ens;
    ens["models"] = ensemble_models;
    ens["mode"] = std::string(vote_mode_name(ensemble.mode));
    ens["priority"] = ensemble.priority_order;
    ens["grid_step"] = "1/" + std::to_string(grid_denominator);
    ens["threads"] = threads;
    if (weights_file) ens["weights"] = weights_file->string();
    j["ensemble"] = ens;
    return j.dump();
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override,
                             std::optional<std::filesystem::path> output_override) {
    ExperimentConfig cfg;
    cfg.source = path;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw UsageError("config file not found: " + path.string());
        cfg.source_text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    toml::table root;
    try {
        root = toml::parse(cfg.source_text, path.string());
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "config: " << e.description() << " (" << path.string() << ":" << e.source().begin.line << ")";
        throw UsageError(msg.str());
    }

    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    TableReader top(root, "");

    cfg.seed = top.non_negative("seed").value_or(0);
    if (seed_override) cfg.seed = *seed_override;
    cfg.output_dir = resolve(base, top.string("output_dir").value_or("out"));
    if (output_override) cfg.output_dir = *output_override;

    if (const auto* data = top.table("data")) {
        TableReader r(*data, "data");
        if (auto f = r.string("format")) {
            auto parsed = parse_data_format(*f);
            if (!parsed) throw UsageError("config: data.format must be tsv, csv or json-lines");
            cfg.format = *parsed;
        }
        for (const char* split : {"train", "dev", "test"}) {
            if (auto p = r.string(split)) {
                cfg.splits[split] = resolve(base, *p);
                require_file(cfg.splits[split], std::string("data.") + split);
            }
        }
        if (const auto* schema = r.table("schema")) {
            TableReader s(*schema, "data.schema");
            if (auto v = s.string("id")) cfg.schema.id = *v;
            if (auto v = s.string("text")) cfg.schema.text = *v;
            if (auto v = s.string("label")) cfg.schema.label = *v;
            if (auto v = s.boolean("allow_empty_text")) cfg.schema.allow_empty_text = *v;
            if (cfg.schema.text.empty()) throw UsageError("config: data.schema.text may not be empty");
            s.finish();
        }
        r.finish();
    }

    if (const auto* feat = top.table("featurizer")) {
        TableReader r(*feat, "featurizer");
        if (auto v = r.integer("dims_log2")) {
            if (*v < 0 || *v > 64) throw UsageError("config: featurizer.dims_log2 must be in [8, 26]");
            cfg.featurizer.dims_log2 = static_cast<std::uint32_t>(*v);
        }
        if (auto v = r.range("word_ngrams")) cfg.featurizer.word_ngrams = *v;
        if (auto v = r.range("char_ngrams")) cfg.featurizer.char_ngrams = *v;
        if (auto v = r.non_negative("hash_seed")) cfg.featurizer.hash_seed = *v;
        if (auto v = r.string("tf_scaling")) {
            auto parsed = parse_tf_scaling(*v);
            if (!parsed) throw UsageError("config: featurizer.tf_scaling must be binary or log1p-count");
            cfg.featurizer.tf_scaling = *parsed;
        }
        r.finish();
    }
    try {
        cfg.featurizer.validate();
    } catch (const ArgumentError& e) {
        throw UsageError(std::string("config: featurizer: ") + e.what());
    }

    std::set<std::string> ids;
    if (const auto* refs = top.array_of_tables("reference_models")) {
        for (const auto& node : *refs) {
            TableReader r(*node.as_table(), "reference_models");
            ReferenceModel m;
            m.id = r.string("id").value_or("");
            check_id(m.id, "reference_models entry");
            if (auto a = r.string("approach")) m.approach = *a;
            m.train = read_train_config(r, cfg.seed, m.explicit_seed);
            r.finish();
            if (!ids.insert(m.id).second) throw UsageError("config: duplicate model id '" + m.id + "'");
            cfg.reference_models.push_back(std::move(m));
        }
    }
    if (const auto* exts = top.array_of_tables("external_models")) {
        for (const auto& node : *exts) {
            TableReader r(*node.as_table(), "external_models");
            ExternalModel m;
            m.id = r.string("id").value_or("");
            check_id(m.id, "external_models entry");
            if (auto a = r.string("approach")) m.approach = *a;
            for (const char* split : {"train", "dev", "test"}) {
                if (auto p = r.string(split)) {
                    m.predictions[split] = resolve(base, *p);
                    require_file(m.predictions[split], "external model '" + m.id + "' " + split + " predictions");
                }
            }
            r.finish();
            if (!ids.insert(m.id).second) throw UsageError("config: duplicate model id '" + m.id + "'");
            cfg.external_models.push_back(std::move(m));
        }
    }

    if (const auto* ens = top.table("ensemble")) {
        TableReader r(*ens, "ensemble");
        if (auto v = r.strings("models")) cfg.ensemble_models = *v;
        if (auto v = r.string("mode")) {
            auto parsed = parse_vote_mode(*v);
            if (!parsed) throw UsageError("config: ensemble.mode must be hard or weighted");
            cfg.ensemble.mode = *parsed;
        }
        if (auto v = r.strings("priority")) cfg.ensemble.priority_order = *v;
        if (auto v = r.string("grid_step")) cfg.grid_denominator = parse_grid_step(*v);
        if (auto v = r.integer("threads")) {
            if (*v < 1) throw UsageError("config: ensemble.threads must be >= 1");
            cfg.threads = static_cast<std::size_t>(*v);
        }
        if (auto v = r.string("weights")) cfg.weights_file = resolve(base, *v);
        r.finish();
    }
    top.finish();

    if (cfg.ensemble_models.empty()) {
        for (const auto& m : cfg.reference_models) cfg.ensemble_models.push_back(m.id);
        for (const auto& m : cfg.external_models) cfg.ensemble_models.push_back(m.id);
    }
    std::set<std::string> members;
    for (const auto& id : cfg.ensemble_models) {
        if (!ids.contains(id)) throw UsageError("config: ensemble.models names unknown model '" + id + "'");
        if (!members.insert(id).second) throw UsageError("config: ensemble.models repeats '" + id + "'");
    }
    if (!cfg.ensemble.priority_order.empty()) {
        try {
            resolve_priority(cfg.ensemble.priority_order, cfg.ensemble_models);
        } catch (const ArgumentError& e) {
            throw UsageError(std::string("config: ensemble.priority: ") + e.what());
        }
    }
    return cfg;
}

} // namespace vitd::cli

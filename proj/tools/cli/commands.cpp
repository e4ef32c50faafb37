#include "commands.hpp"

#include "config.hpp"
#include "manifest.hpp"

#include <vitd/corpus.hpp>
#include <vitd/ensemble.hpp>
#include <vitd/linear_model.hpp>
#include <vitd/metrics.hpp>
#include <vitd/prediction_store.hpp>
#include <vitd/version.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace vitd::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr std::size_t kBootstrapResamples = 1000;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("file not found: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

void require_file(const fs::path& path, const std::string& what) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw UsageError(what + " not found: " + path.string());
}

DatasetSplit load_named_split(const ExperimentConfig& cfg, const std::string& name, ManifestStep& step) {
    auto it = cfg.splits.find(name);
    if (it == cfg.splits.end()) throw UsageError("split '" + name + "' is not configured under [data]");
    require_file(it->second, "data." + name);
    step.add_input(it->second);
    return load_split(it->second, cfg.format, cfg.schema, name);
}

std::vector<LabelClass> require_gold(const DatasetSplit& split, const std::string& purpose) {
    if (!split.labeled() || split.empty()) {
        throw UsageError("split '" + split.name() + "' has no gold labels; " + purpose + " needs them");
    }
    return split.gold_labels();
}

std::string approach_of(const ExperimentConfig& cfg, const std::string& id) {
    if (const auto* r = cfg.find_reference(id)) return r->approach;
    if (const auto* e = cfg.find_external(id)) return e->approach;
    return "";
}

// Loads the predictions of every ensemble member for one split and builds
// the complete matrix.
PredictionMatrix load_matrix(const ExperimentConfig& cfg, const DatasetSplit& split, ManifestStep& step) {
    std::vector<PredictionRecord> all;
    for (const auto& id : cfg.ensemble_models) {
        const auto path = cfg.predictions_path(id, split.name());
        require_file(path, "predictions for model '" + id + "' on split '" + split.name() + "'");
        step.add_input(path);
        auto records = import_predictions(path, split);
        for (auto& r : records) {
            if (r.model_id == id) all.push_back(std::move(r));
        }
    }
    return assemble_matrix(all, cfg.ensemble_models, split);
}

PriorityOrder priority_for(const ExperimentConfig& cfg, const PredictionMatrix& matrix) {
    return resolve_priority(cfg.ensemble.priority_order, matrix.model_ids());
}

ojson stats_json(const std::string& name, const SplitStats& s) {
    ojson j;
    j["split"] = name;
    j["count"] = s.count;
    if (!s.per_class_counts.empty()) {
        ojson counts = ojson::object();
        ojson fractions = ojson::object();
        for (LabelClass c : kAllLabels) {
            const auto key = std::to_string(label_code(c));
            counts[key] = s.per_class_counts.at(c);
            fractions[key] = s.per_class_fractions.at(c);
        }
        j["per_class_counts"] = counts;
        j["per_class_fractions"] = fractions;
    }
    j["max_word_count"] = s.max_word_count;
    return j;
}

std::string stats_table(const std::vector<std::pair<std::string, SplitStats>>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(8) << "split" << std::right << std::setw(8) << "count";
    for (LabelClass c : kAllLabels) out << std::setw(18) << label_name(c);
    out << std::setw(11) << "max words" << "\n";
    for (const auto& [name, s] : rows) {
        out << std::left << std::setw(8) << name << std::right << std::setw(8) << s.count;
        for (LabelClass c : kAllLabels) {
            std::string cell = "-";
            if (!s.per_class_counts.empty()) {
                std::ostringstream f;
                f << s.per_class_counts.at(c) << " (" << std::fixed << std::setprecision(3)
                  << s.per_class_fractions.at(c) << ")";
                cell = f.str();
            }
            out << std::setw(18) << cell;
        }
        out << std::setw(11) << s.max_word_count << "\n";
    }
    return out.str();
}

void cmd_stats(const ExperimentConfig& cfg, ManifestStep& step, std::ostream& out) {
    if (cfg.splits.empty()) throw UsageError("no splits configured under [data]");
    std::vector<std::pair<std::string, SplitStats>> rows;
    for (const char* name : {"train", "dev", "test"}) {
        if (!cfg.has_split(name)) continue;
        rows.emplace_back(name, compute_stats(load_named_split(cfg, name, step)));
    }
    ojson j;
    j["splits"] = ojson::array();
    for (const auto& [name, s] : rows) j["splits"].push_back(stats_json(name, s));
    const std::string table = stats_table(rows);

    const auto json_path = cfg.output_dir / "stats.json";
    const auto txt_path = cfg.output_dir / "stats.txt";
    write_file(json_path, j.dump(2) + "\n");
    write_file(txt_path, table);
    step.add_output(json_path);
    step.add_output(txt_path);
    out << table;
}

std::vector<const ReferenceModel*> select_reference(const ExperimentConfig& cfg, const std::string& model) {
    std::vector<const ReferenceModel*> chosen;
    if (model.empty()) {
        for (const auto& m : cfg.reference_models) chosen.push_back(&m);
        if (chosen.empty()) throw UsageError("no reference models configured");
        return chosen;
    }
    if (const auto* m = cfg.find_reference(model)) return {m};
    if (cfg.find_external(model)) {
        throw UsageError("model '" + model + "' is external; its predictions come from files, not training");
    }
    throw UsageError("unknown model id '" + model + "'");
}

void cmd_train(const ExperimentConfig& cfg, const std::string& model, ManifestStep& step, std::ostream& out) {
    const auto models = select_reference(cfg, model);
    const DatasetSplit train_split = load_named_split(cfg, "train", step);
    std::optional<DatasetSplit> dev;
    if (cfg.has_split("dev")) {
        dev = load_named_split(cfg, "dev", step);
        if (!dev->labeled() || dev->empty()) dev.reset();
    }

    std::vector<TrainResult> results;
    for (const auto* m : models) {
        results.push_back(train(train_split, cfg.featurizer, m->train, dev ? &*dev : nullptr));
    }

    const auto fingerprint = cfg.featurizer.fingerprint();
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto model_path = cfg.model_path(models[i]->id);
        const auto log_path = cfg.training_log_path(models[i]->id);
        fs::create_directories(model_path.parent_path());
        write_model(model_path, ModelArtifact{results[i].params, fingerprint});
        write_file(log_path, results[i].log.to_json_lines());
        step.add_output(model_path);
        step.add_output(log_path);

        const auto& last = results[i].log.epochs.back();
        out << models[i]->id << ": " << last.epoch << " epochs, final loss " << std::setprecision(6)
            << last.mean_loss;
        if (last.dev_macro_f1) out << ", dev macro F1 " << std::fixed << std::setprecision(4) << *last.dev_macro_f1;
        out << std::defaultfloat << "\n";
    }
}

void cmd_predict(const ExperimentConfig& cfg, const std::string& model, const std::string& split_name,
                 ManifestStep& step, std::ostream& out) {
    const auto models = select_reference(cfg, model);
    const DatasetSplit split = load_named_split(cfg, split_name, step);

    std::vector<ModelArtifact> artifacts;
    for (const auto* m : models) {
        const auto path = cfg.model_path(m->id);
        require_file(path, "model artifact for '" + m->id + "'");
        step.add_input(path);
        artifacts.push_back(read_model(path));
        if (artifacts.back().featurizer_fingerprint != cfg.featurizer.fingerprint()) {
            throw ConsistencyError("model artifact " + path.string() +
                                   " was trained with a different featurizer configuration");
        }
    }

    std::vector<std::vector<PredictionRecord>> outputs;
    for (std::size_t i = 0; i < models.size(); ++i) {
        outputs.push_back(predict_split(artifacts[i].params, split, cfg.featurizer, models[i]->id));
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto path = cfg.output_dir / "predictions" / (models[i]->id + "." + split_name + ".jsonl");
        fs::create_directories(path.parent_path());
        write_predictions(path, outputs[i]);
        step.add_output(path);
        out << models[i]->id << ": " << outputs[i].size() << " predictions -> " << path.string() << "\n";
    }
}

void cmd_import(const ExperimentConfig& cfg, const fs::path& file, const std::string& split_name,
                ManifestStep& step, std::ostream& out) {
    const DatasetSplit split = load_named_split(cfg, split_name, step);
    require_file(file, "predictions file");
    step.add_input(file);
    const auto records = import_predictions(file, split);

    std::vector<std::string> models;
    for (const auto& r : records) {
        if (std::find(models.begin(), models.end(), r.model_id) == models.end()) models.push_back(r.model_id);
    }
    if (models.empty()) throw EmptyInputError(file.string() + ": no prediction records");
    for (const auto& id : models) {
        if (!cfg.find_reference(id) && !cfg.find_external(id)) {
            throw UsageError("predictions name model '" + id + "', which is not configured");
        }
    }
    // Completeness check for every model present.
    const PredictionMatrix matrix = assemble_matrix(records, models, split);
    for (std::size_t m = 0; m < models.size(); ++m) {
        const auto sub = matrix.select_models(std::vector<std::size_t>{m});
        const auto canonical = export_matrix(sub);
        const auto path = cfg.output_dir / "predictions" / (models[m] + "." + split_name + ".jsonl");
        fs::create_directories(path.parent_path());
        write_predictions(path, canonical);
        step.add_output(path);
        out << models[m] << ": " << canonical.size() << " records imported -> " << path.string() << "\n";
    }
}

std::optional<WeightVector> load_weights(const ExperimentConfig& cfg, const std::optional<std::string>& flag,
                                         ManifestStep& step) {
    fs::path path = flag ? fs::path(*flag) : cfg.weights_file.value_or(cfg.output_dir / "weights.json");
    require_file(path, "weights file");
    step.add_input(path);
    auto weights = WeightVector::from_json(read_file(path));
    try {
        weights.aligned_to(cfg.ensemble_models);
    } catch (const ArgumentError& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
    return weights;
}

void cmd_ensemble(const ExperimentConfig& cfg, const std::string& split_name, VoteMode mode,
                  const std::optional<std::string>& weights_flag, ManifestStep& step, std::ostream& out) {
    const DatasetSplit split = load_named_split(cfg, split_name, step);
    std::optional<WeightVector> weights;
    if (mode == VoteMode::Weighted) weights = load_weights(cfg, weights_flag, step);
    const PredictionMatrix matrix = load_matrix(cfg, split, step);

    EnsembleConfig ens = cfg.ensemble;
    ens.mode = mode;
    const EnsembleOutput result = ensemble_predict(matrix, ens, weights);

    const std::string mode_name(vote_mode_name(mode));
    const std::string stem = split_name + "." + mode_name;
    std::string labels = "id\tlabel\n";
    std::string votes;
    for (std::size_t e = 0; e < matrix.num_examples(); ++e) {
        const auto& id = matrix.example_ids()[e];
        labels += id + "\t" + std::to_string(label_code(result.labels[e])) + "\n";
        ojson v;
        v["example_id"] = id;
        ojson per_model = ojson::object();
        for (std::size_t m = 0; m < matrix.num_models(); ++m) {
            per_model[matrix.model_ids()[m]] = label_code(result.breakdown[e].votes[m]);
        }
        v["votes"] = per_model;
        v["label"] = label_code(result.labels[e]);
        v["score"] = result.breakdown[e].winning_score;
        votes += v.dump() + "\n";
    }

    std::vector<std::pair<fs::path, std::string>> files;
    files.emplace_back(cfg.output_dir / "ensemble" / (stem + ".labels.tsv"), labels);
    files.emplace_back(cfg.output_dir / "ensemble" / (stem + ".votes.jsonl"), votes);

    std::string summary;
    if (split.labeled() && !split.empty()) {
        const auto gold = split.gold_labels();
        std::vector<ScoreRow> rows;
        ojson models = ojson::array();
        for (std::size_t m = 0; m < matrix.num_models(); ++m) {
            const auto rep = evaluate(matrix.row(m), gold);
            const auto& id = matrix.model_ids()[m];
            rows.push_back({id, approach_of(cfg, id), rep.macro_f1});
            models.push_back({{"model", id}, {"approach", rows.back().approach}, {"macro_f1", rep.macro_f1}});
        }
        const auto report = evaluate(result.labels, gold);
        const auto ci = bootstrap_ci(result.labels, gold, kBootstrapResamples, cfg.seed);
        const std::string ens_name = mode == VoteMode::Hard ? "Hard Voting" : "Weighted Voting";
        rows.push_back({ens_name, "Ensemble", report.macro_f1});

        ojson j;
        j["split"] = split_name;
        j["mode"] = mode_name;
        j["models"] = models;
        if (weights) j["weights"] = ojson::parse(weights->to_json(-1))["weights"];
        j["ensemble"] = ojson::parse(report_to_json(report, -1));
        j["bootstrap_ci"] = {{"level", 0.95}, {"resamples", kBootstrapResamples}, {"seed", cfg.seed},
                             {"low", ci.low}, {"high", ci.high}};

        std::ostringstream txt;
        render_score_table(txt, rows, rows.size() - 1);
        txt << "\n" << ens_name << " on " << split_name << "\n";
        render_report(txt, report);
        txt << "\n95% bootstrap CI for macro F1 (" << kBootstrapResamples << " resamples): [" << std::fixed
            << std::setprecision(4) << ci.low << ", " << ci.high << "]\n";
        summary = txt.str();
        files.emplace_back(cfg.output_dir / "ensemble" / (stem + ".report.json"), j.dump(2) + "\n");
        files.emplace_back(cfg.output_dir / "ensemble" / (stem + ".report.txt"), summary);
    }

    for (const auto& [path, content] : files) {
        write_file(path, content);
        step.add_output(path);
    }
    out << mode_name << " vote over " << matrix.num_models() << " model(s), " << matrix.num_examples()
        << " examples -> " << files.front().first.string() << "\n";
    out << summary;
}

void cmd_search_weights(const ExperimentConfig& cfg, std::optional<std::uint32_t> q,
                        std::optional<std::size_t> threads, ManifestStep& step, std::ostream& out) {
    if (!cfg.has_split("dev")) throw UsageError("search-weights needs a dev split under [data]");
    const DatasetSplit dev = load_named_split(cfg, "dev", step);
    const auto gold = require_gold(dev, "weight search");
    const PredictionMatrix matrix = load_matrix(cfg, dev, step);

    SearchOptions options;
    options.grid_denominator = q.value_or(cfg.grid_denominator);
    options.threads = threads.value_or(cfg.threads);
    const auto result = search_weights(matrix, gold, priority_for(cfg, matrix), options);

    const auto path = cfg.output_dir / "weights.json";
    write_file(path, result.to_json(2) + "\n");
    step.add_output(path);
    out << "evaluated " << result.evaluations << " weight vectors at step 1/" << result.grid_denominator << "\n"
        << std::fixed << std::setprecision(4) << "best dev macro F1 " << result.best_dev_macro_f1
        << " (uniform " << result.uniform_dev_macro_f1 << ")\n";
    for (std::size_t i = 0; i < result.best_weights.model_ids().size(); ++i) {
        out << "  " << result.best_weights.model_ids()[i] << " = " << result.best_weights.weights()[i] << "\n";
    }
    out << std::defaultfloat;
}

void cmd_subsets(const ExperimentConfig& cfg, const std::string& split_name, ManifestStep& step,
                 std::ostream& out) {
    const DatasetSplit split = load_named_split(cfg, split_name, step);
    const auto gold = require_gold(split, "subset exploration");
    const PredictionMatrix matrix = load_matrix(cfg, split, step);
    const auto rows = subset_ensembles(matrix, gold, priority_for(cfg, matrix));

    std::ostringstream csv, txt;
    write_subset_csv(csv, rows);
    render_subset_table(txt, rows);
    const auto csv_path = cfg.output_dir / "subsets" / (split_name + ".csv");
    const auto txt_path = cfg.output_dir / "subsets" / (split_name + ".txt");
    write_file(csv_path, csv.str());
    write_file(txt_path, txt.str());
    step.add_output(csv_path);
    step.add_output(txt_path);
    out << txt.str();
}

// Labels file as written by `ensemble`: header "id<TAB>label", one row per example.
std::vector<LabelClass> read_labels_file(const fs::path& path, const DatasetSplit& split) {
    const std::string content = read_file(path);
    std::map<std::string, LabelClass> by_id;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    std::vector<std::string> unknown;
    std::set<std::string> known;
    for (const auto& id : split.ids()) known.insert(id);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw ParseError(line_no, path.string() + ": expected two tab-separated columns");
        }
        const std::string id = line.substr(0, tab);
        const std::string value = line.substr(tab + 1);
        if (header) {
            header = false;
            if (id == "id" && value == "label") continue;
            throw ParseError(line_no, path.string() + ": expected header 'id<TAB>label'");
        }
        const auto label = parse_label(value);
        if (!label) throw ParseError(line_no, path.string() + ": label '" + value + "' outside {0,1,2}");
        if (!known.contains(id)) {
            unknown.push_back(id);
            continue;
        }
        if (!by_id.emplace(id, *label).second) throw DuplicationError("duplicate label for example '" + id + "'");
    }
    if (!unknown.empty()) throw ReferentialError(unknown);
    std::vector<LabelClass> labels;
    for (const auto& ex : split.examples()) {
        auto it = by_id.find(ex.id);
        if (it == by_id.end()) throw CompletenessError("labels", ex.id);
        labels.push_back(it->second);
    }
    return labels;
}

void cmd_evaluate(const ExperimentConfig& cfg, const std::string& split_name,
                  const std::optional<std::string>& predictions, const std::optional<std::string>& labels,
                  bool as_json, ManifestStep& step, std::ostream& out) {
    if (predictions.has_value() == labels.has_value()) {
        throw UsageError("evaluate needs exactly one of --predictions or --labels");
    }
    const DatasetSplit split = load_named_split(cfg, split_name, step);
    const auto gold = require_gold(split, "evaluation");

    std::vector<std::pair<std::string, EvalReport>> reports;
    if (labels) {
        require_file(*labels, "labels file");
        step.add_input(*labels);
        reports.emplace_back(fs::path(*labels).filename().string(), evaluate(read_labels_file(*labels, split), gold));
    } else {
        require_file(*predictions, "predictions file");
        step.add_input(*predictions);
        const auto records = import_predictions(*predictions, split);
        std::vector<std::string> models;
        for (const auto& r : records) {
            if (std::find(models.begin(), models.end(), r.model_id) == models.end()) models.push_back(r.model_id);
        }
        if (models.empty()) throw EmptyInputError(*predictions + ": no prediction records");
        const auto matrix = assemble_matrix(records, models, split);
        for (std::size_t m = 0; m < models.size(); ++m) reports.emplace_back(models[m], evaluate(matrix.row(m), gold));
    }

    if (as_json) {
        ojson j = ojson::object();
        for (const auto& [name, rep] : reports) j[name] = ojson::parse(report_to_json(rep, -1));
        out << j.dump(2) << "\n";
        return;
    }
    std::vector<ScoreRow> rows;
    for (const auto& [name, rep] : reports) rows.push_back({name, approach_of(cfg, name), rep.macro_f1});
    render_score_table(out, rows);
    for (const auto& [name, rep] : reports) {
        out << "\n" << name << "\n";
        render_report(out, rep);
    }
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Violence-inciting text detection toolkit: ensemble experiments over hashed linear models and "
                 "imported predictions."};
    app.name("vitd");
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonOptions common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "Experiment TOML file")->required();
        sub->add_option("--seed", common.seed, "Override the global seed");
        sub->add_option("--out", common.out, "Override the output directory");
    };

    std::string model, split, mode_text, grid_step;
    std::optional<std::string> weights, predictions, labels, file;
    std::optional<std::size_t> threads;
    bool as_json = false;

    auto* stats = app.add_subcommand("stats", "Per-split counts, class fractions and maximum word count");
    add_common(stats);

    auto* train_cmd = app.add_subcommand("train", "Train reference models");
    add_common(train_cmd);
    train_cmd->add_option("--model", model, "Reference model id (default: all)");

    auto* predict_cmd = app.add_subcommand("predict", "Write reference-model predictions for a split");
    add_common(predict_cmd);
    predict_cmd->add_option("--model", model, "Reference model id (default: all)");
    predict_cmd->add_option("--split", split, "train, dev or test")->required();

    auto* import_cmd = app.add_subcommand("import", "Validate an external predictions file");
    add_common(import_cmd);
    import_cmd->add_option("--file", file, "Predictions JSON-lines file")->required();
    import_cmd->add_option("--split", split, "Split the predictions refer to")->required();

    auto* ensemble_cmd = app.add_subcommand("ensemble", "Combine model predictions by voting");
    add_common(ensemble_cmd);
    ensemble_cmd->add_option("--split", split, "Split to ensemble")->required();
    ensemble_cmd->add_option("--mode", mode_text, "hard or weighted (default: from config)");
    ensemble_cmd->add_option("--weights", weights, "Weights JSON (default: from config or <out>/weights.json)");

    auto* search_cmd = app.add_subcommand("search-weights", "Grid-search voting weights on dev");
    add_common(search_cmd);
    search_cmd->add_option("--grid-step", grid_step, "Grid step as 1/q");
    search_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* subsets_cmd = app.add_subcommand("subsets", "Hard-vote macro F1 of every model subset");
    add_common(subsets_cmd);
    subsets_cmd->add_option("--split", split, "Labeled split")->required();

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a predictions or labels file against gold");
    add_common(evaluate_cmd);
    evaluate_cmd->add_option("--split", split, "Labeled split")->required();
    evaluate_cmd->add_option("--predictions", predictions, "Predictions JSON-lines file");
    evaluate_cmd->add_option("--labels", labels, "Labels TSV written by `ensemble`");
    evaluate_cmd->add_flag("--json", as_json, "Print JSON instead of tables");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        auto* sub = app.get_subcommands().front();
        std::optional<fs::path> out_override;
        if (common.out) out_override = fs::path(*common.out);
        const ExperimentConfig cfg = load_config(common.config, common.seed, out_override);
        std::optional<std::uint32_t> q;
        if (!grid_step.empty()) q = parse_grid_step(grid_step);
        VoteMode mode = cfg.ensemble.mode;
        if (!mode_text.empty()) {
            auto parsed = parse_vote_mode(mode_text);
            if (!parsed) throw UsageError("--mode must be hard or weighted, got '" + mode_text + "'");
            mode = *parsed;
        }

        ManifestStep step(sub->get_name(), cfg, std::vector<std::string>(args.begin(), args.end()));
        const std::string name = sub->get_name();
        if (name == "stats") cmd_stats(cfg, step, out);
        else if (name == "train") cmd_train(cfg, model, step, out);
        else if (name == "predict") cmd_predict(cfg, model, split, step, out);
        else if (name == "import") cmd_import(cfg, *file, split, step, out);
        else if (name == "ensemble") cmd_ensemble(cfg, split, mode, weights, step, out);
        else if (name == "search-weights") cmd_search_weights(cfg, q, threads, step, out);
        else if (name == "subsets") cmd_subsets(cfg, split, step, out);
        else if (name == "evaluate") cmd_evaluate(cfg, split, predictions, labels, as_json, step, out);
        step.commit();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "vitd: error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "vitd: error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace vitd::cli

// Acceptance suite: one PASS/FAIL line per criterion.
#include "commands.hpp"
#include "synthetic.hpp"

#include <vitd/ensemble.hpp>
#include <vitd/error.hpp>
#include <vitd/linear_model.hpp>
#include <vitd/metrics.hpp>
#include <vitd/prediction_store.hpp>
#include <vitd/random.hpp>

#include <json.hpp>

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace vitd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

std::vector<LabelClass> random_labels(DeterministicRng& rng, std::size_t n) {
    std::vector<LabelClass> out(n);
    for (auto& l : out) l = kAllLabels[rng.uniform_below(kNumClasses)];
    return out;
}

std::vector<std::size_t> shuffled_priority(DeterministicRng& rng, std::size_t m) {
    auto p = default_priority(m);
    rng.shuffle(std::span<std::size_t>(p));
    return p;
}

// Plain mode count; ties go to the first listed model whose label is tied.
LabelClass counting_oracle(const std::vector<LabelClass>& votes, const std::vector<std::size_t>& priority) {
    int count[3] = {0, 0, 0};
    for (auto v : votes) ++count[label_index(v)];
    const int best = std::max({count[0], count[1], count[2]});
    for (auto k : priority)
        if (count[label_index(votes[k])] == best) return votes[k];
    return votes[priority[0]];
}

std::vector<LabelClass> tuple_of(std::size_t code, std::size_t m) {
    std::vector<LabelClass> v(m);
    for (auto& l : v) {
        l = kAllLabels[code % 3];
        code /= 3;
    }
    return v;
}

PredictionMatrix matrix_of(const std::vector<std::vector<LabelClass>>& rows) {
    std::vector<std::string> models, examples;
    std::vector<PredictionRecord> records;
    for (std::size_t i = 0; i < rows.front().size(); ++i) examples.push_back("e" + std::to_string(i));
    for (std::size_t m = 0; m < rows.size(); ++m) {
        models.push_back("m" + std::to_string(m));
        for (std::size_t i = 0; i < rows[m].size(); ++i)
            records.push_back(make_record(examples[i], models[m], std::nullopt, rows[m][i]));
    }
    return assemble_matrix(records, models, examples);
}

class Scratch {
public:
    explicit Scratch(const std::string& tag)
        : m_path(fs::temp_directory_path() / ("vitd-acceptance-" + tag + "-" + std::to_string(::getpid()))) {
        fs::remove_all(m_path);
        fs::create_directories(m_path);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(m_path, ec);
    }
    const fs::path& path() const { return m_path; }

private:
    fs::path m_path;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int vitd(const fs::path& config, std::vector<std::string> args, std::string* err_text = nullptr) {
    args.push_back("--config");
    args.push_back(config.string());
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (err_text) *err_text = err.str();
    return code;
}

Outcome voting_oracle() {
    Outcome o;
    DeterministicRng rng(101);
    for (int order = 0; order < 4; ++order) {
        const auto prio = order == 0 ? default_priority(5) : shuffled_priority(rng, 5);
        for (std::size_t code = 0; code < 243; ++code) {
            const auto votes = tuple_of(code, 5);
            o.require(hard_vote(votes, prio) == counting_oracle(votes, prio), "mismatch on a 5-model tuple");
        }
    }
    for (std::size_t m : {3u, 7u}) {
        for (int t = 0; t < 10000; ++t) {
            const auto votes = random_labels(rng, m);
            const auto prio = shuffled_priority(rng, m);
            o.require(hard_vote(votes, prio) == counting_oracle(votes, prio),
                      "mismatch on a random " + std::to_string(m) + "-model tuple");
        }
    }
    if (o.pass) o.detail = "243 + 2 x 10000 tuples agree";
    return o;
}

Outcome weighted_invariances() {
    Outcome o;
    DeterministicRng rng(102);
    std::size_t checks = 0;
    for (int order = 0; order < 4; ++order) {
        const auto prio = shuffled_priority(rng, 5);
        const std::vector<double> uniform(5, 0.2);
        for (std::size_t code = 0; code < 243; ++code) {
            const auto votes = tuple_of(code, 5);
            o.require(weighted_vote(votes, uniform, prio) == hard_vote(votes, prio), "uniform weights differ from hard vote");
            ++checks;
        }
    }
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> w(5);
        for (double& x : w) x = rng.uniform_below(4) * rng.uniform_unit();
        w[rng.uniform_below(5)] += 0.05;
        if (trial % 4 == 0) w = {0.1, 0.2, 0.3, 0.15, 0.25};
        const auto prio = shuffled_priority(rng, 5);
        for (double k : {1e-6, 0.3, 7.0, 1e6}) {
            std::vector<double> scaled(w);
            for (double& x : scaled) x *= k;
            for (std::size_t code = 0; code < 243; ++code) {
                const auto votes = tuple_of(code, 5);
                o.require(weighted_vote(votes, scaled, prio) == weighted_vote(votes, w, prio),
                          "scaling changed a label");
                ++checks;
            }
        }
    }
    if (o.pass) o.detail = std::to_string(checks) + " comparisons exact";
    return o;
}

Outcome metric_oracle() {
    Outcome o;
    DeterministicRng rng(103);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.uniform_below(500);
        const auto gold = random_labels(rng, n);
        auto pred = random_labels(rng, n);
        if (trial % 2)
            for (std::size_t i = 0; i < n; ++i)
                if (rng.uniform_unit() < 0.7) pred[i] = gold[i];
        const auto rep = evaluate(pred, gold);
        double f1_sum = 0.0;
        for (int c = 0; c < 3; ++c) {
            std::size_t tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool p = label_code(pred[i]) == c, g = label_code(gold[i]) == c;
                tp += p && g;
                fp += p && !g;
                fn += !p && g;
            }
            const double prec = tp + fp ? double(tp) / double(tp + fp) : 0.0;
            const double rec = tp + fn ? double(tp) / double(tp + fn) : 0.0;
            const double f1 = tp ? 2.0 * tp / double(2 * tp + fp + fn) : 0.0;
            worst = std::max({worst, std::abs(prec - rep.per_class[c].precision),
                              std::abs(rec - rep.per_class[c].recall), std::abs(f1 - rep.per_class[c].f1)});
            f1_sum += f1;
        }
        worst = std::max(worst, std::abs(f1_sum / 3.0 - rep.macro_f1));
    }
    o.require(worst <= 1e-12, "max deviation " + std::to_string(worst));
    const double hand = evaluate(std::vector<LabelClass>{LabelClass::NonViolence, LabelClass::PassiveViolence,
                                                         LabelClass::PassiveViolence, LabelClass::DirectViolence},
                                 std::vector<LabelClass>{LabelClass::NonViolence, LabelClass::NonViolence,
                                                         LabelClass::PassiveViolence, LabelClass::DirectViolence})
                            .macro_f1;
    o.require(std::abs(hand - 7.0 / 9.0) <= 1e-12, "hand fixture gave " + std::to_string(hand));
    if (o.pass) {
        std::ostringstream d;
        d << "max deviation " << worst << ", hand fixture " << hand;
        o.detail = d.str();
    }
    return o;
}

Outcome optimizer() {
    Outcome o;
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    auto p = ModelParams::zeros(1);
    p.weights[0] = 1.0;
    auto g = ModelParams::zeros(1);
    g.weights[0] = 0.5;
    auto s = OptimizerState::zeros(1);
    adamw_step(p, g, s, cfg);
    const double theta = p.weights[0];
    o.require(std::abs(theta - 0.899) <= 1e-6, "hand fixture gave " + std::to_string(theta));

    // Independent Adam on a flat vector.
    cfg.weight_decay = 0.0;
    cfg.learning_rate = 0.01;
    DeterministicRng rng(104);
    const std::size_t dims = 8;
    auto params = ModelParams::zeros(dims);
    for (double& w : params.weights) w = rng.uniform_unit() - 0.5;
    std::vector<double> theta_ref(params.weights);
    theta_ref.insert(theta_ref.end(), params.bias.begin(), params.bias.end());
    std::vector<double> m(theta_ref.size()), v(theta_ref.size());
    auto state = OptimizerState::zeros(dims);
    double worst = 0.0;
    for (int t = 1; t <= 50; ++t) {
        auto grad = ModelParams::zeros(dims);
        for (double& x : grad.weights) x = 2 * rng.uniform_unit() - 1;
        for (double& x : grad.bias) x = 2 * rng.uniform_unit() - 1;
        adamw_step(params, grad, state, cfg);
        std::vector<double> flat_g(grad.weights);
        flat_g.insert(flat_g.end(), grad.bias.begin(), grad.bias.end());
        for (std::size_t i = 0; i < theta_ref.size(); ++i) {
            m[i] = 0.9 * m[i] + 0.1 * flat_g[i];
            v[i] = 0.999 * v[i] + 0.001 * flat_g[i] * flat_g[i];
            theta_ref[i] -= 0.01 * (m[i] / (1 - std::pow(0.9, t))) / (std::sqrt(v[i] / (1 - std::pow(0.999, t))) + 1e-8);
        }
        for (std::size_t i = 0; i < dims * kNumClasses; ++i) worst = std::max(worst, std::abs(params.weights[i] - theta_ref[i]));
        for (std::size_t k = 0; k < kNumClasses; ++k)
            worst = std::max(worst, std::abs(params.bias[k] - theta_ref[dims * kNumClasses + k]));
    }
    o.require(worst <= 1e-12, "Adam deviation " + std::to_string(worst));

    double worst_rel = 0.0;
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        Logits z;
        for (double& x : z) x = 8 * rng.uniform_unit() - 4;
        const auto gold = kAllLabels[rng.uniform_below(3)];
        const auto ce = cross_entropy(z, gold);
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            Logits a = z, b = z;
            a[k] += h;
            b[k] -= h;
            const double fd = (cross_entropy(a, gold).loss - cross_entropy(b, gold).loss) / (2 * h);
            worst_rel = std::max(worst_rel, std::abs(fd - ce.grad[k]) / std::max(1.0, std::abs(ce.grad[k])));
        }
    }
    o.require(worst_rel <= 1e-5, "finite-difference gap " + std::to_string(worst_rel));
    if (o.pass) {
        std::ostringstream d;
        d.precision(9);
        d << "theta' = " << theta << ", Adam gap " << worst << ", FD gap " << worst_rel;
        o.detail = d.str();
    }
    return o;
}

Outcome learning_smoke() {
    Outcome o;
    Scratch dir("smoke");
    fixture::WorkspaceOptions opts;
    opts.seed = 17;
    opts.externals.clear();
    const auto cfg = fixture::write_workspace(dir.path(), opts);
    std::string err;
    o.require(vitd(cfg, {"train"}, &err) == 0, "train failed: " + err);
    o.require(vitd(cfg, {"predict", "--split", "dev"}, &err) == 0, "predict failed: " + err);
    o.require(vitd(cfg, {"ensemble", "--split", "dev"}, &err) == 0, "ensemble failed: " + err);
    if (!o.pass) return o;
    const auto report = nlohmann::json::parse(slurp(dir.path() / "out" / "ensemble" / "dev.hard.report.json"));
    const double f1 = report["ensemble"]["macro_f1"];
    o.require(f1 >= 0.95, "dev macro F1 " + std::to_string(f1));
    if (o.pass) o.detail = "300 train / 90 dev, dev macro F1 " + std::to_string(f1);
    return o;
}

Outcome weight_search() {
    Outcome o;
    DeterministicRng rng(106);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t m = 2 + rng.uniform_below(4);
        const std::size_t n = 20 + rng.uniform_below(100);
        const auto gold = random_labels(rng, n);
        std::vector<std::vector<LabelClass>> rows;
        for (std::size_t k = 0; k < m; ++k) {
            auto row = random_labels(rng, n);
            for (std::size_t i = 0; i < n; ++i)
                if (rng.uniform_unit() < 0.5) row[i] = gold[i];
            rows.push_back(row);
        }
        const auto matrix = matrix_of(rows);
        const auto prio = shuffled_priority(rng, m);
        const std::uint32_t q = 1 + static_cast<std::uint32_t>(rng.uniform_below(12));
        const auto r = search_weights(matrix, gold, prio, {q, 2});
        std::vector<LabelClass> hard;
        for (std::size_t i = 0; i < n; ++i) hard.push_back(hard_vote(matrix.column(i), prio));
        o.require(r.best_dev_macro_f1 >= evaluate(hard, gold).macro_f1, "search fell below uniform weighting");
    }

    const auto gold = random_labels(rng, 200);
    const auto perfect = matrix_of({random_labels(rng, 200), gold, random_labels(rng, 200)});
    const auto r = search_weights(perfect, gold, default_priority(3));
    const auto out = ensemble_predict(perfect, {{}, VoteMode::Weighted}, r.best_weights);
    o.require(evaluate(out.labels, gold).macro_f1 == 1.0, "perfect-model fixture did not reach F1 = 1");

    std::vector<std::vector<LabelClass>> five;
    for (int k = 0; k < 5; ++k) five.push_back(random_labels(rng, 90));
    const auto big = search_weights(matrix_of(five), random_labels(rng, 90), default_priority(5), {20, 1});
    o.require(big.evaluations == 10626, "M=5 grid evaluated " + std::to_string(big.evaluations));
    if (o.pass) o.detail = "25 random fixtures >= uniform, perfect fixture F1 1.0, M=5 grid 10626 points";
    return o;
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        files[fs::relative(entry.path(), root).generic_string()] = slurp(entry.path());
    }
    return files;
}

Outcome determinism() {
    Outcome o;
    Scratch a("det-a"), b("det-b");
    fixture::WorkspaceOptions opts;
    opts.seed = 23;
    const auto cfg_a = fixture::write_workspace(a.path(), opts);
    const auto cfg_b = fixture::write_workspace(b.path(), opts);
    const std::vector<std::vector<std::string>> pipeline = {
        {"stats"},
        {"train"},
        {"predict", "--split", "dev"},
        {"predict", "--split", "test"},
        {"ensemble", "--split", "dev"},
        {"ensemble", "--split", "test"},
        {"search-weights", "--threads", "4"},
        {"ensemble", "--split", "test", "--mode", "weighted"},
        {"subsets", "--split", "dev"},
    };
    for (const auto& cfg : {cfg_a, cfg_b}) {
        for (const auto& args : pipeline) {
            std::string err;
            o.require(vitd(cfg, args, &err) == 0, args[0] + " failed: " + err);
        }
    }
    if (!o.pass) return o;

    auto left = tree_contents(a.path());
    auto right = tree_contents(b.path());
    // The manifest carries timestamps and absolute paths.
    left.erase("out/manifest.jsonl");
    right.erase("out/manifest.jsonl");
    o.require(left.size() == right.size(), "different file sets");
    std::size_t compared = 0;
    for (const auto& [name, content] : left) {
        auto it = right.find(name);
        o.require(it != right.end() && it->second == content, "artifact differs: " + name);
        ++compared;
    }

    std::istringstream csv(left["out/subsets/dev.csv"]);
    std::string line;
    std::getline(csv, line);
    std::size_t rows = 0;
    std::optional<double> full;
    while (std::getline(csv, line)) {
        ++rows;
        std::istringstream fields(line);
        std::string rank, size, models, f1;
        std::getline(fields, rank, ',');
        std::getline(fields, size, ',');
        std::getline(fields, models, ',');
        std::getline(fields, f1, ',');
        if (size == "5") full = std::stod(f1);
    }
    const auto hard = nlohmann::json::parse(left["out/ensemble/dev.hard.report.json"]);
    o.require(rows == 31, "subset table has " + std::to_string(rows) + " rows");
    o.require(full && *full == hard["ensemble"]["macro_f1"].get<double>(), "full-set row differs from hard vote");
    if (o.pass) o.detail = std::to_string(compared) + " files byte-identical, 31 subset rows, full set = hard vote";
    return o;
}

template <typename E>
bool rejects(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const E&) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

Outcome wire_round_trip() {
    Outcome o;
    Scratch dir("wire");
    fixture::CorpusOptions copts;
    copts.size = 200;
    copts.seed = 8;
    const auto split = fixture::make_corpus("wire", copts);
    std::vector<PredictionRecord> records;
    std::vector<std::string> models;
    for (int m = 0; m < 5; ++m) {
        models.push_back("model-" + std::to_string(m));
        const auto part = fixture::noisy_predictions(split, models.back(), 0.5 + 0.1 * m, 40 + m);
        records.insert(records.end(), part.begin(), part.end());
    }
    const auto path = dir.path() / "all.jsonl";
    write_predictions(path, records);
    const auto imported = import_predictions(path, split);
    o.require(imported == records, "records changed through export/import");
    const auto matrix = assemble_matrix(imported, models, split);
    o.require(export_matrix(matrix) == records, "matrix export differs");
    std::ostringstream again;
    write_predictions(again, imported);
    o.require(again.str() == slurp(path), "re-export is not byte-identical");

    const std::string good = slurp(path);
    auto corrupt = [&](const std::string& content) {
        const auto p = dir.path() / "corrupt.jsonl";
        std::ofstream(p, std::ios::binary) << content;
        return p;
    };
    const auto unknown = corrupt(good + "{\"example_id\":\"nobody\",\"model_id\":\"model-0\",\"label\":0}\n");
    o.require(rejects<ReferentialError>([&] { import_predictions(unknown, split); }), "unknown id not rejected");
    const auto dup = corrupt(good + good.substr(0, good.find('\n') + 1));
    o.require(rejects<DuplicationError>([&] { import_predictions(dup, split); }), "duplicate cell not rejected");
    const auto mismatch = corrupt("{\"example_id\":\"" + split.examples()[0].id +
                                  "\",\"model_id\":\"model-0\",\"logits\":[0.0,4.0,1.0],\"label\":0}\n" +
                                  good.substr(good.find('\n') + 1));
    o.require(rejects<ConsistencyError>([&] { import_predictions(mismatch, split); }), "label/logits mismatch not rejected");
    if (o.pass) o.detail = "1000 records lossless, 3 corruption classes rejected";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int number;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "voting oracle equivalence", 1.0, voting_oracle},
        {2, "weighted-vote invariances", 1.0, weighted_invariances},
        {3, "metric oracle equivalence", 0.0, metric_oracle},
        {4, "optimizer correctness", 0.0, optimizer},
        {5, "end-to-end learning smoke", 30.0, learning_smoke},
        {6, "weight-search guarantees", 60.0, weight_search},
        {7, "pipeline determinism", 0.0, determinism},
        {8, "wire-format round trip", 0.0, wire_round_trip},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0 && secs >= c.budget_s) o.require(false, "over time budget");
        failures += !o.pass;
        std::printf("[%s] %d %s (%.3f s) %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, secs, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}

#include "synthetic.hpp"

#include <vitd/error.hpp>
#include <vitd/random.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace vitd::fixture {
namespace {

namespace fs = std::filesystem;

const std::array<std::vector<std::string>, kNumClasses> kKeywords = {{
    {"গান", "নদী", "আকাশ", "ফুল", "বই", "উৎসব", "বৃষ্টি", "bazaar", "cricket", "recipe", "garden", "poem"},
    {"অপদার্থ", "বেহায়া", "নির্লজ্জ", "ধিক্কার", "shameless", "useless", "traitor", "liar", "coward", "fraud",
     "disgrace", "clown"},
    {"মারো", "জ্বালিয়ে", "খুন", "পিটিয়ে", "attack", "burn", "kill", "smash", "hang", "destroy", "strike",
     "bomb"},
}};

const std::vector<std::string> kFiller = {
    "আমি", "তুমি", "সে", "আমরা", "এই", "ওই", "আজ", "কাল", "এবং", "কিন্তু", "the", "a",
    "today", "people", "they", "this", "that", "we", "news", "post", "city", "road", "time", "again",
};

LabelClass draw_class(DeterministicRng& rng, const std::array<double, kNumClasses>& mix) {
    double total = 0.0;
    for (double w : mix) total += w;
    double u = rng.uniform_unit() * total;
    for (LabelClass c : kAllLabels) {
        u -= mix[label_index(c)];
        if (u < 0.0) return c;
    }
    return LabelClass::DirectViolence;
}

Logits logits_for(DeterministicRng& rng, LabelClass label) {
    Logits z{};
    for (double& v : z) v = 2.0 * rng.uniform_unit() - 1.0;
    z[label_index(label)] = 1.5 + rng.uniform_unit();
    return z;
}

LabelClass other_label(DeterministicRng& rng, LabelClass gold) {
    const std::size_t shift = 1 + rng.uniform_below(2);
    return kAllLabels[(label_index(gold) + shift) % kNumClasses];
}

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << content;
}

} // namespace

DatasetSplit make_corpus(const std::string& name, const CorpusOptions& options) {
    DeterministicRng rng(options.seed);
    std::vector<Example> examples;
    examples.reserve(options.size);
    for (std::size_t i = 0; i < options.size; ++i) {
        const LabelClass c = draw_class(rng, options.class_mix);
        const auto& keywords = kKeywords[label_index(c)];
        std::vector<std::string> tokens;
        const std::size_t n_key = 1 + rng.uniform_below(3);
        const std::size_t n_fill = 3 + rng.uniform_below(8);
        for (std::size_t k = 0; k < n_key; ++k) tokens.push_back(keywords[rng.uniform_below(keywords.size())]);
        for (std::size_t k = 0; k < n_fill; ++k) tokens.push_back(kFiller[rng.uniform_below(kFiller.size())]);
        rng.shuffle(std::span<std::string>(tokens));

        std::string text;
        for (const auto& t : tokens) text += (text.empty() ? "" : " ") + t;
        char id[48];
        std::snprintf(id, sizeof id, "%s-%05zu", name.c_str(), i + 1);
        Example ex{id, text, std::nullopt};
        if (options.labeled) ex.label = c;
        examples.push_back(std::move(ex));
    }
    return DatasetSplit(name, std::move(examples));
}

std::vector<PredictionRecord> noisy_predictions(const DatasetSplit& split, const std::string& model_id,
                                                double accuracy, std::uint64_t seed) {
    DeterministicRng rng(seed);
    std::vector<PredictionRecord> out;
    for (const auto& ex : split.examples()) {
        LabelClass label;
        if (ex.label) label = rng.uniform_unit() < accuracy ? *ex.label : other_label(rng, *ex.label);
        else label = kAllLabels[rng.uniform_below(kNumClasses)];
        out.push_back(make_record(ex.id, model_id, logits_for(rng, label), label));
    }
    return out;
}

std::vector<PredictionRecord> random_predictions(const DatasetSplit& split, const std::string& model_id,
                                                 std::uint64_t seed) {
    DeterministicRng rng(seed);
    std::vector<PredictionRecord> out;
    for (const auto& ex : split.examples()) {
        const LabelClass label = kAllLabels[rng.uniform_below(kNumClasses)];
        out.push_back(make_record(ex.id, model_id, logits_for(rng, label), label));
    }
    return out;
}

fs::path write_workspace(const fs::path& dir, const WorkspaceOptions& options) {
    fs::create_directories(dir);
    const std::uint64_t s = options.seed;
    const DatasetSplit train = make_corpus("train", {options.train_size, {0.5, 0.35, 0.15}, true, s * 31 + 1});
    const DatasetSplit dev = make_corpus("dev", {options.dev_size, {0.5, 0.35, 0.15}, true, s * 31 + 2});
    const DatasetSplit test =
        make_corpus("test", {options.test_size, {0.5, 0.35, 0.15}, options.test_labeled, s * 31 + 3});

    for (const auto* split : {&train, &dev, &test}) {
        std::ostringstream out;
        write_split(out, *split, DataFormat::Tsv);
        write_text(dir / (split->name() + ".tsv"), out.str());
    }

    std::ostringstream toml;
    toml << "seed = " << s << "\n"
         << "output_dir = \"out\"\n\n"
         << "[data]\nformat = \"tsv\"\ntrain = \"train.tsv\"\ndev = \"dev.tsv\"\ntest = \"test.tsv\"\n\n"
         << "[featurizer]\ndims_log2 = " << options.dims_log2
         << "\nword_ngrams = [1, 1]\nchar_ngrams = [2, 4]\nhash_seed = 0\ntf_scaling = \"log1p-count\"\n";

    for (std::size_t r = 0; r < options.reference_models; ++r) {
        toml << "\n[[reference_models]]\nid = \"linear-" << static_cast<char>('a' + r) << "\"\n"
             << "learning_rate = " << options.learning_rate << "\nepochs = " << options.epochs << "\n"
             << "batch_size = 16\nseed = " << s + r << "\n";
    }
    std::uint64_t stream = 100;
    for (const auto& ext : options.externals) {
        for (const auto* split : {&dev, &test}) {
            const auto records = noisy_predictions(*split, ext.id, ext.accuracy, s * 1000 + stream++);
            std::ostringstream out;
            write_predictions(out, records);
            write_text(dir / "external" / (ext.id + "." + split->name() + ".jsonl"), out.str());
        }
        toml << "\n[[external_models]]\nid = \"" << ext.id << "\"\napproach = \"External (simulated)\"\n"
             << "dev = \"external/" << ext.id << ".dev.jsonl\"\ntest = \"external/" << ext.id << ".test.jsonl\"\n";
    }
    toml << "\n[ensemble]\nmode = \"hard\"\ngrid_step = \"" << options.grid_step << "\"\nthreads = 1\n";

    const auto config = dir / "experiment.toml";
    write_text(config, toml.str());
    return config;
}

} // namespace vitd::fixture

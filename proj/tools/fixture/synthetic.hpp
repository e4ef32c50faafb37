#pragma once

#include <vitd/corpus.hpp>
#include <vitd/prediction_store.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vitd::fixture {

/// Generates a corpus whose classes are separated by disjoint keyword
/// vocabularies mixed with shared filler words.
struct CorpusOptions {
    std::size_t size = 300;
    std::array<double, kNumClasses> class_mix{0.5, 0.35, 0.15};
    bool labeled = true;
    std::uint64_t seed = 0;
};

DatasetSplit make_corpus(const std::string& name, const CorpusOptions& options);

/// Predictions that match gold with probability `accuracy` and otherwise
/// pick one of the two wrong labels uniformly. Unlabeled examples get a
/// uniform label. Logits always have their argmax at the label.
std::vector<PredictionRecord> noisy_predictions(const DatasetSplit& split, const std::string& model_id,
                                                double accuracy, std::uint64_t seed);

/// Labels drawn uniformly, ignoring gold.
std::vector<PredictionRecord> random_predictions(const DatasetSplit& split, const std::string& model_id,
                                                 std::uint64_t seed);

struct ExternalSpec {
    std::string id;
    double accuracy = 0.7;
};

struct WorkspaceOptions {
    std::size_t train_size = 300;
    std::size_t dev_size = 90;
    std::size_t test_size = 90;
    bool test_labeled = true;
    std::uint64_t seed = 0;
    std::size_t reference_models = 2;
    double learning_rate = 0.1;
    std::size_t epochs = 10;
    std::uint32_t dims_log2 = 18;
    std::vector<ExternalSpec> externals{{"ext-a", 0.8}, {"ext-b", 0.7}, {"ext-c", 0.6}};
    std::string grid_step = "1/20";
};

/// Writes train/dev/test TSV files, external prediction files for dev and
/// test, and experiment.toml into `dir`. Returns the config path.
std::filesystem::path write_workspace(const std::filesystem::path& dir, const WorkspaceOptions& options);

} // namespace vitd::fixture

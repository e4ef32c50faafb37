#pragma once

#include <vitd/corpus.hpp>
#include <vitd/ensemble.hpp>
#include <vitd/error.hpp>
#include <vitd/featurizer.hpp>
#include <vitd/linear_model.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vitd::cli {

/// Invalid configuration or command line; maps to exit status 2.
class UsageError : public Error {
public:
    using Error::Error;
};

struct ReferenceModel {
    std::string id;
    std::string approach = "Linear (hashed n-grams)";
    TrainConfig train;
    bool explicit_seed = false;
};

struct ExternalModel {
    std::string id;
    std::string approach = "External";
    /// Split name -> predictions file. Splits without an entry fall back
    /// to <output_dir>/predictions/<id>.<split>.jsonl.
    std::map<std::string, std::filesystem::path> predictions;
};

struct ExperimentConfig {
    std::filesystem::path source;      // config file path
    std::string source_text;           // raw bytes, hashed into the manifest
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;

    DataFormat format = DataFormat::Tsv;
    DataSchema schema;
    std::map<std::string, std::filesystem::path> splits; // train / dev / test

    FeaturizerConfig featurizer;
    std::vector<ReferenceModel> reference_models;
    std::vector<ExternalModel> external_models;

    /// Participating models in matrix order (default: reference then external).
    std::vector<std::string> ensemble_models;
    EnsembleConfig ensemble;
    std::uint32_t grid_denominator = 20;
    std::size_t threads = 1;
    std::optional<std::filesystem::path> weights_file;

    const ReferenceModel* find_reference(const std::string& id) const;
    const ExternalModel* find_external(const std::string& id) const;
    bool has_split(const std::string& name) const { return splits.contains(name); }

    std::filesystem::path model_path(const std::string& id) const;
    std::filesystem::path training_log_path(const std::string& id) const;
    std::filesystem::path predictions_path(const std::string& model_id, const std::string& split) const;

    /// Fully resolved configuration, defaults included, as JSON text.
    std::string resolved_json() const;
};

/// Reads and validates a TOML experiment file. Relative paths resolve
/// against the file's directory. Throws UsageError on any problem,
/// including referenced input files that do not exist.
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = {},
                             std::optional<std::filesystem::path> output_override = {});

/// Parses "1/q" (or a bare integer q) into q.
std::uint32_t parse_grid_step(const std::string& text);

} // namespace vitd::cli

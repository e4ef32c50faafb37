#pragma once

#include "vitd/corpus.hpp"
#include "vitd/featurizer.hpp"
#include "vitd/prediction_store.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vitd {

using Probabilities = std::array<double, kNumClasses>;

/// Softmax with max-subtraction. Throws NumericError on non-finite input.
Probabilities softmax(const Logits& logits);

struct LossAndGradient {
    double loss = 0.0;
    Logits grad{};
};

/// loss = -log softmax(logits)[gold], grad = softmax(logits) - onehot(gold).
/// The loss goes through log-sum-exp so it stays finite for large margins.
LossAndGradient cross_entropy(const Logits& logits, LabelClass gold);

/// Multinomial logistic regression parameters: weights is K x D row-major.
struct ModelParams {
    std::size_t dims = 0;
    std::vector<double> weights;
    Logits bias{};

    static ModelParams zeros(std::size_t dims);

    double& weight(std::size_t cls, std::size_t feature) { return weights[cls * dims + feature]; }
    double weight(std::size_t cls, std::size_t feature) const { return weights[cls * dims + feature]; }

    bool all_finite() const noexcept;
    bool operator==(const ModelParams&) const = default;
};

/// Optimizer and training hyperparameters. Defaults: lr 1e-5, batch 16,
/// 10 epochs, standard AdamW moment and decay constants.
struct TrainConfig {
    double learning_rate = 1e-5;
    std::size_t batch_size = 16;
    std::size_t epochs = 10;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
    std::uint64_t seed = 0;
    bool shuffle = true;

    /// Throws ArgumentError naming the first violated constraint.
    void validate() const;
};

/// First and second moment accumulators, shaped like the parameters.
struct OptimizerState {
    ModelParams m;
    ModelParams v;
    std::uint64_t t = 0;

    static OptimizerState zeros(std::size_t dims);
};

/// One decoupled-weight-decay Adam step:
///   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
///   theta -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps) + lr * wd * theta
/// Decay uses the pre-step theta and never touches the bias.
/// Throws ArgumentError on shape mismatch.
void adamw_step(ModelParams& params, const ModelParams& grads, OptimizerState& state, const TrainConfig& config);

/// logits = W x + b.
Logits compute_logits(const ModelParams& params, const FeatureVector& features);

struct EpochLog {
    std::size_t epoch = 0; // 1-based
    double mean_loss = 0.0;
    std::optional<double> dev_macro_f1;
};

struct TrainingLog {
    std::vector<EpochLog> epochs;

    /// One JSON object per epoch: {"epoch":1,"mean_loss":..,"dev_macro_f1":..}.
    std::string to_json_lines() const;
};

struct TrainResult {
    ModelParams params;
    TrainingLog log;
};

/// Mini-batch AdamW on mean cross-entropy from zero-initialized parameters.
/// Each epoch visits the examples in a fresh seeded permutation (or file
/// order when shuffle is off); the last partial batch is trained. Returns the
/// final-epoch parameters. When `dev` is labeled, its macro F1 is logged
/// after each epoch.
///
/// Throws ArgumentError if the split is empty or unlabeled or a config is invalid.
TrainResult train(const DatasetSplit& split, const FeaturizerConfig& featurizer_config,
                  const TrainConfig& train_config, const DatasetSplit* dev = nullptr);

/// Featurizes and scores one example; the label is the lowest-index argmax.
PredictionRecord predict(const ModelParams& params, const Example& example, const FeaturizerConfig& featurizer_config,
                         const std::string& model_id);

std::vector<PredictionRecord> predict_split(const ModelParams& params, const DatasetSplit& split,
                                            const FeaturizerConfig& featurizer_config, const std::string& model_id);

/// Binary model artifact, all fields little-endian:
///   8 bytes  magic "VITDLIN1"
///   u32      number of classes (3)
///   u64      dims
///   u64      featurizer config fingerprint
///   f64 x K  bias
///   f64 x KD weights, row-major
struct ModelArtifact {
    ModelParams params;
    std::uint64_t featurizer_fingerprint = 0;
};

void write_model(std::ostream& out, const ModelArtifact& artifact);
void write_model(const std::filesystem::path& path, const ModelArtifact& artifact);
/// Throws ParseError on a truncated or foreign file, IoError if unreadable.
ModelArtifact read_model(std::istream& in);
ModelArtifact read_model(const std::filesystem::path& path);

} // namespace vitd

#include "vitd/linear_model.hpp"

#include "vitd/error.hpp"
#include "vitd/metrics.hpp"
#include "vitd/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace vitd {
namespace {

constexpr char kMagic[8] = {'V', 'I', 'T', 'D', 'L', 'I', 'N', '1'};

void check_finite(const Logits& logits) {
    for (double z : logits) {
        if (!std::isfinite(z)) throw NumericError("non-finite logit");
    }
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(bytes, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ParseError(0, "truncated model artifact");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw ParseError(0, "truncated model artifact");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void check_shapes(const ModelParams& a, const ModelParams& b, const char* what) {
    if (a.dims != b.dims || a.weights.size() != b.weights.size()) {
        throw ArgumentError(std::string("adamw_step: ") + what + " shape mismatch");
    }
}

} // namespace

Probabilities softmax(const Logits& logits) {
    check_finite(logits);
    const double max = *std::max_element(logits.begin(), logits.end());
    Probabilities p{};
    double sum = 0.0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        p[k] = std::exp(logits[k] - max);
        sum += p[k];
    }
    for (double& v : p) v /= sum;
    return p;
}

LossAndGradient cross_entropy(const Logits& logits, LabelClass gold) {
    const Probabilities p = softmax(logits);
    const double max = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - max);
    const std::size_t g = label_index(gold);

    LossAndGradient out;
    out.loss = std::max(0.0, max + std::log(sum) - logits[g]);
    for (std::size_t k = 0; k < kNumClasses; ++k) out.grad[k] = p[k] - (k == g ? 1.0 : 0.0);
    return out;
}

ModelParams ModelParams::zeros(std::size_t dims) {
    ModelParams p;
    p.dims = dims;
    p.weights.assign(kNumClasses * dims, 0.0);
    return p;
}

bool ModelParams::all_finite() const noexcept {
    auto finite = [](double v) { return std::isfinite(v); };
    return std::all_of(weights.begin(), weights.end(), finite) && std::all_of(bias.begin(), bias.end(), finite);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ArgumentError("learning_rate must be > 0");
    if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
    if (epochs < 1) throw ArgumentError("epochs must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ArgumentError("beta1 must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ArgumentError("beta2 must be in [0, 1)");
    if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be > 0");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) throw ArgumentError("weight_decay must be >= 0");
}

OptimizerState OptimizerState::zeros(std::size_t dims) {
    return OptimizerState{ModelParams::zeros(dims), ModelParams::zeros(dims), 0};
}

void adamw_step(ModelParams& params, const ModelParams& grads, OptimizerState& state, const TrainConfig& config) {
    check_shapes(params, grads, "gradient");
    check_shapes(params, state.m, "first moment");
    check_shapes(params, state.v, "second moment");

    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double lr = config.learning_rate;
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    const double correction1 = 1.0 - std::pow(b1, t);
    const double correction2 = 1.0 - std::pow(b2, t);

    auto update = [&](double& theta, double g, double& m, double& v, double decay) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        theta = theta - lr * m_hat / (std::sqrt(v_hat) + config.epsilon) - lr * decay * theta;
    };

    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        update(params.weights[i], grads.weights[i], state.m.weights[i], state.v.weights[i], config.weight_decay);
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        update(params.bias[k], grads.bias[k], state.m.bias[k], state.v.bias[k], 0.0);
    }
}

Logits compute_logits(const ModelParams& params, const FeatureVector& features) {
    if (features.dims != params.dims) throw ArgumentError("feature dimension does not match the model");
    Logits z = params.bias;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const double* row = params.weights.data() + k * params.dims;
        for (const auto& e : features.entries) z[k] += row[e.index] * e.value;
    }
    return z;
}

std::string TrainingLog::to_json_lines() const {
    std::string out;
    for (const auto& e : epochs) {
        nlohmann::ordered_json j;
        j["epoch"] = e.epoch;
        j["mean_loss"] = e.mean_loss;
        if (e.dev_macro_f1) j["dev_macro_f1"] = *e.dev_macro_f1;
        out += j.dump();
        out += '\n';
    }
    return out;
}

TrainResult train(const DatasetSplit& split, const FeaturizerConfig& featurizer_config,
                  const TrainConfig& train_config, const DatasetSplit* dev) {
    if (split.empty()) throw ArgumentError("cannot train on an empty split");
    if (!split.labeled()) throw ArgumentError("training split '" + split.name() + "' is not fully labeled");
    featurizer_config.validate();
    train_config.validate();

    const std::size_t n = split.size();
    const std::size_t dims = featurizer_config.dims();
    std::vector<FeatureVector> features;
    features.reserve(n);
    for (const auto& ex : split.examples()) features.push_back(featurize(ex.text, featurizer_config));
    const auto gold = split.gold_labels();

    std::vector<FeatureVector> dev_features;
    std::vector<LabelClass> dev_gold;
    const bool log_dev = dev != nullptr && !dev->empty() && dev->labeled();
    if (log_dev) {
        for (const auto& ex : dev->examples()) dev_features.push_back(featurize(ex.text, featurizer_config));
        dev_gold = dev->gold_labels();
    }

    TrainResult result{ModelParams::zeros(dims), {}};
    ModelParams& params = result.params;
    ModelParams grads = ModelParams::zeros(dims);
    OptimizerState state = OptimizerState::zeros(dims);
    DeterministicRng rng(train_config.seed);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
        if (train_config.shuffle) rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;

        for (std::size_t start = 0; start < n; start += train_config.batch_size) {
            const std::size_t end = std::min(n, start + train_config.batch_size);
            const double scale = 1.0 / static_cast<double>(end - start);

            for (std::size_t pos = start; pos < end; ++pos) {
                const std::size_t i = order[pos];
                const auto ce = cross_entropy(compute_logits(params, features[i]), gold[i]);
                loss_sum += ce.loss;
                for (std::size_t k = 0; k < kNumClasses; ++k) {
                    const double gk = ce.grad[k] * scale;
                    for (const auto& e : features[i].entries) grads.weight(k, e.index) += gk * e.value;
                    grads.bias[k] += gk;
                }
            }

            adamw_step(params, grads, state, train_config);

            // Reset only the cells this batch touched.
            for (std::size_t pos = start; pos < end; ++pos) {
                for (const auto& e : features[order[pos]].entries) {
                    for (std::size_t k = 0; k < kNumClasses; ++k) grads.weight(k, e.index) = 0.0;
                }
            }
            grads.bias = Logits{};
        }

        EpochLog entry{epoch, loss_sum / static_cast<double>(n), std::nullopt};
        if (log_dev) {
            std::vector<LabelClass> dev_pred;
            dev_pred.reserve(dev_features.size());
            for (const auto& f : dev_features) dev_pred.push_back(argmax_label(compute_logits(params, f)));
            entry.dev_macro_f1 = evaluate(dev_pred, dev_gold).macro_f1;
        }
        result.log.epochs.push_back(entry);
    }

    if (!params.all_finite()) throw NumericError("training diverged to non-finite parameters");
    return result;
}

PredictionRecord predict(const ModelParams& params, const Example& example, const FeaturizerConfig& featurizer_config,
                         const std::string& model_id) {
    const Logits z = compute_logits(params, featurize(example.text, featurizer_config));
    return make_record(example.id, model_id, z, std::nullopt);
}

std::vector<PredictionRecord> predict_split(const ModelParams& params, const DatasetSplit& split,
                                            const FeaturizerConfig& featurizer_config, const std::string& model_id) {
    std::vector<PredictionRecord> out;
    out.reserve(split.size());
    for (const auto& ex : split.examples()) out.push_back(predict(params, ex, featurizer_config, model_id));
    return out;
}

void write_model(std::ostream& out, const ModelArtifact& artifact) {
    const auto& p = artifact.params;
    out.write(kMagic, sizeof kMagic);
    put_u32(out, static_cast<std::uint32_t>(kNumClasses));
    put_u64(out, p.dims);
    put_u64(out, artifact.featurizer_fingerprint);
    for (double b : p.bias) put_f64(out, b);
    for (double w : p.weights) put_f64(out, w);
}

void write_model(const std::filesystem::path& path, const ModelArtifact& artifact) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    write_model(out, artifact);
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

ModelArtifact read_model(std::istream& in) {
    char magic[sizeof kMagic];
    if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
        throw ParseError(0, "not a vitd linear model artifact");
    }
    if (get_u32(in) != kNumClasses) throw ParseError(0, "model artifact has an unexpected class count");
    const std::uint64_t dims = get_u64(in);
    if (dims == 0 || dims > (std::uint64_t{1} << 26) || !std::has_single_bit(dims)) {
        throw ParseError(0, "model artifact has an invalid dimension");
    }

    ModelArtifact artifact;
    artifact.featurizer_fingerprint = get_u64(in);
    artifact.params = ModelParams::zeros(static_cast<std::size_t>(dims));
    for (double& b : artifact.params.bias) b = get_f64(in);
    for (double& w : artifact.params.weights) w = get_f64(in);
    if (in.peek() != std::char_traits<char>::eof()) throw ParseError(0, "trailing bytes after model artifact");
    if (!artifact.params.all_finite()) throw NumericError("model artifact contains non-finite values");
    return artifact;
}

ModelArtifact read_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open model artifact");
    return read_model(in);
}

} // namespace vitd

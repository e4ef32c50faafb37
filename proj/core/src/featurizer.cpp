#include "vitd/featurizer.hpp"

#include "vitd/error.hpp"
#include "vitd/hash.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace vitd {
namespace {

std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> words;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = text.find_first_not_of(' ', pos);
        if (start == std::string_view::npos) break;
        std::size_t end = text.find(' ', start);
        if (end == std::string_view::npos) end = text.size();
        words.push_back(text.substr(start, end - start));
        pos = end;
    }
    return words;
}

// Byte offsets of each code point start in valid UTF-8, plus the end offset.
std::vector<std::size_t> code_point_offsets(std::string_view s) {
    std::vector<std::size_t> offsets;
    offsets.reserve(s.size() + 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) offsets.push_back(i);
    }
    offsets.push_back(s.size());
    return offsets;
}

void check_range(const NgramRange& range, std::string_view what) {
    if (!range.enabled()) {
        if (range.min != 0) throw ArgumentError(std::string(what) + " range: max 0 requires min 0");
        return;
    }
    if (range.min < 1 || range.min > range.max) {
        throw ArgumentError(std::string(what) + " range must satisfy 1 <= min <= max");
    }
}

} // namespace

std::optional<TfScaling> parse_tf_scaling(std::string_view name) noexcept {
    if (name == "binary") return TfScaling::Binary;
    if (name == "log1p-count") return TfScaling::Log1pCount;
    return std::nullopt;
}

std::string_view tf_scaling_name(TfScaling scaling) noexcept {
    return scaling == TfScaling::Binary ? "binary" : "log1p-count";
}

void FeaturizerConfig::validate() const {
    if (dims_log2 < 8 || dims_log2 > 26) {
        throw ArgumentError("dims_log2 must be in [8, 26], got " + std::to_string(dims_log2));
    }
    check_range(word_ngrams, "word_ngrams");
    check_range(char_ngrams, "char_ngrams");
    if (!word_ngrams.enabled() && !char_ngrams.enabled()) {
        throw ArgumentError("at least one of word_ngrams/char_ngrams must be enabled");
    }
}

std::string FeaturizerConfig::canonical() const {
    return "hash=" + std::string(kFeatureHashName) + ";dims_log2=" + std::to_string(dims_log2) +
           ";word_ngrams=" + std::to_string(word_ngrams.min) + "-" + std::to_string(word_ngrams.max) +
           ";char_ngrams=" + std::to_string(char_ngrams.min) + "-" + std::to_string(char_ngrams.max) +
           ";hash_seed=" + std::to_string(hash_seed) + ";tf_scaling=" + std::string(tf_scaling_name(tf_scaling));
}

std::uint64_t FeaturizerConfig::fingerprint() const { return xxh64(canonical(), 0); }

std::vector<std::string> extract_ngrams(std::string_view text, const FeaturizerConfig& config) {
    std::vector<std::string> keys;
    const auto words = split_words(text);

    if (config.word_ngrams.enabled()) {
        for (std::uint32_t n = config.word_ngrams.min; n <= config.word_ngrams.max; ++n) {
            for (std::size_t i = 0; i + n <= words.size(); ++i) {
                std::string key = "w" + std::to_string(n) + ":";
                for (std::size_t k = 0; k < n; ++k) {
                    if (k > 0) key.push_back(' ');
                    key.append(words[i + k]);
                }
                keys.push_back(std::move(key));
            }
        }
    }

    if (config.char_ngrams.enabled()) {
        for (const auto word : words) {
            std::string wrapped = "<";
            wrapped.append(word);
            wrapped.push_back('>');
            const auto offsets = code_point_offsets(wrapped);
            const std::size_t length = offsets.size() - 1;
            for (std::uint32_t n = config.char_ngrams.min; n <= config.char_ngrams.max; ++n) {
                for (std::size_t i = 0; i + n <= length; ++i) {
                    keys.push_back("c:" + wrapped.substr(offsets[i], offsets[i + n] - offsets[i]));
                }
            }
        }
    }
    return keys;
}

FeatureVector featurize(std::string_view text, const FeaturizerConfig& config) {
    FeatureVector out;
    out.dims = config.dims();
    const std::uint64_t mask = out.dims - 1;

    std::unordered_map<std::uint32_t, double> accumulated;
    for (const auto& key : extract_ngrams(text, config)) {
        const std::uint64_t h = xxh64(key, config.hash_seed);
        const auto index = static_cast<std::uint32_t>(h & mask);
        accumulated[index] += (h >> 63) == 0 ? 1.0 : -1.0;
    }

    out.entries.reserve(accumulated.size());
    for (const auto& [index, count] : accumulated) {
        if (count == 0.0) continue;
        const double sign = count > 0.0 ? 1.0 : -1.0;
        const double value = config.tf_scaling == TfScaling::Binary ? sign : sign * std::log1p(std::abs(count));
        out.entries.push_back({index, value});
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const FeatureEntry& a, const FeatureEntry& b) { return a.index < b.index; });
    return out;
}

} // namespace vitd

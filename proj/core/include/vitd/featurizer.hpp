#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vitd {

/// Inclusive n-gram length range. {0, 0} disables the family.
struct NgramRange {
    std::uint32_t min = 1;
    std::uint32_t max = 1;

    bool enabled() const noexcept { return max > 0; }
    bool operator==(const NgramRange&) const = default;
};

enum class TfScaling { Binary, Log1pCount };

std::optional<TfScaling> parse_tf_scaling(std::string_view name) noexcept;
std::string_view tf_scaling_name(TfScaling scaling) noexcept;

struct FeaturizerConfig {
    std::uint32_t dims_log2 = 18;
    NgramRange word_ngrams{1, 1};
    NgramRange char_ngrams{2, 4};
    std::uint64_t hash_seed = 0;
    TfScaling tf_scaling = TfScaling::Log1pCount;

    std::size_t dims() const noexcept { return std::size_t{1} << dims_log2; }

    /// Throws ArgumentError unless dims_log2 is in [8, 26], each enabled
    /// range has 1 <= min <= max, and at least one family is enabled.
    void validate() const;

    /// Stable textual form; hashed into model artifacts and manifests.
    std::string canonical() const;
    std::uint64_t fingerprint() const;

    bool operator==(const FeaturizerConfig&) const = default;
};

struct FeatureEntry {
    std::uint32_t index = 0;
    double value = 0.0;

    bool operator==(const FeatureEntry&) const = default;
};

/// Sparse vector in a 2^dims_log2 space; entries strictly increasing by index.
struct FeatureVector {
    std::size_t dims = 0;
    std::vector<FeatureEntry> entries;

    bool operator==(const FeatureVector&) const = default;
};

/// Hashed word and character n-gram features of normalized text.
///
/// Word n-grams span whitespace-separated tokens. Character n-grams are taken
/// over the code points of each token wrapped as `<token>`, so they never
/// cross a word boundary. Each n-gram key is hashed with XXH64 under
/// `hash_seed`; the index is the hash modulo the dimension and bit 63 picks
/// the sign. Signed counts are summed per index, then scaled by
/// sign(c)*log1p(|c|) or sign(c); cells that cancel to zero are dropped.
FeatureVector featurize(std::string_view text, const FeaturizerConfig& config);

/// The n-gram keys featurize() hashes, in extraction order (with repeats).
std::vector<std::string> extract_ngrams(std::string_view text, const FeaturizerConfig& config);

} // namespace vitd

#include <doctest.h>

#include <vitd/error.hpp>
#include <vitd/featurizer.hpp>
#include <vitd/hash.hpp>
#include <vitd/random.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

using namespace vitd;

namespace {

FeaturizerConfig words_only(std::uint32_t dims_log2 = 18) {
    FeaturizerConfig c;
    c.dims_log2 = dims_log2;
    c.word_ngrams = {1, 1};
    c.char_ngrams = {0, 0};
    return c;
}

} // namespace

TEST_CASE("empty text gives an empty vector") {
    const auto v = featurize("", FeaturizerConfig{});
    CHECK(v.entries.empty());
    CHECK(v.dims == (1u << 18));
}

// Expected entries were computed by a separate Python script using the
// `xxhash` package and the documented key scheme.
TEST_CASE("featurize matches an external reference computation") {
    FeaturizerConfig c;
    c.dims_log2 = 10;
    c.word_ngrams = {1, 2};
    c.char_ngrams = {2, 3};
    c.hash_seed = 7;
    const std::vector<std::pair<std::uint32_t, double>> expected = {
        {47, -1.0986122886681096}, {178, 0.69314718055994529}, {216, 0.69314718055994529},
        {241, 0.69314718055994529}, {277, 1.0986122886681096}, {293, -0.69314718055994529},
        {369, 1.0986122886681096}, {427, 0.69314718055994529}, {522, 1.0986122886681096},
        {541, 0.69314718055994529}, {580, -1.0986122886681096}, {588, -0.69314718055994529},
        {674, 1.0986122886681096}, {823, -0.69314718055994529}, {834, 1.0986122886681096},
        {840, 1.0986122886681096}, {903, -1.0986122886681096}, {932, -0.69314718055994529},
        {938, -0.69314718055994529}, {1018, 1.0986122886681096},
    };
    const std::string text = "ভালো ভালো দিন";
    CHECK(extract_ngrams(text, c).size() == 30);
    const auto v = featurize(text, c);
    REQUIRE(v.entries.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(v.entries[i].index == expected[i].first);
        CHECK(std::abs(v.entries[i].value - expected[i].second) <= 1e-15);
    }

    const auto w = featurize("aa aa aa b", words_only(8));
    REQUIRE(w.entries.size() == 2);
    CHECK(w.entries[0].index == 121);
    CHECK(w.entries[0].value == doctest::Approx(-std::log1p(3.0)).epsilon(1e-15));
    CHECK(w.entries[1].index == 197);
    CHECK(w.entries[1].value == doctest::Approx(-std::log1p(1.0)).epsilon(1e-15));
}

TEST_CASE("n-gram extraction") {
    FeaturizerConfig c;
    c.word_ngrams = {1, 2};
    c.char_ngrams = {2, 2};
    const auto keys = extract_ngrams("ab কি", c);
    const std::vector<std::string> expected = {"w1:ab", "w1:কি", "w2:ab কি", "c:<a", "c:ab", "c:b>",
                                               "c:<ক", "c:কি", "c:ি>"};
    CHECK(keys == expected);
}

TEST_CASE("determinism and invariants") {
    const FeaturizerConfig c;
    const std::string text = "আমরা সবাই রাজা আমাদের এই রাজার রাজত্বে";
    const auto a = featurize(text, c);
    const auto b = featurize(text, c);
    CHECK(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].index == b.entries[i].index);
        CHECK(a.entries[i].value == b.entries[i].value);
    }

    DeterministicRng rng(2);
    const std::vector<std::string> vocab = {"a", "bb", "ccc", "আমি", "তুমি", "x", "yz", "কি"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string t;
        for (std::uint64_t i = 0, n = rng.uniform_below(12); i < n; ++i)
            t += (t.empty() ? "" : " ") + vocab[rng.uniform_below(vocab.size())];
        const auto v = featurize(t, c);
        CHECK(v.entries.size() <= extract_ngrams(t, c).size());
        for (std::size_t i = 0; i < v.entries.size(); ++i) {
            CHECK(std::isfinite(v.entries[i].value));
            CHECK(v.entries[i].value != 0.0);
            CHECK(v.entries[i].index < v.dims);
            if (i > 0) CHECK(v.entries[i - 1].index < v.entries[i].index);
        }
    }
}

TEST_CASE("word unigrams are a bag") {
    const auto c = words_only();
    const auto ab = featurize("a b", c);
    const auto ba = featurize("b a", c);
    REQUIRE(ab.entries.size() == ba.entries.size());
    for (std::size_t i = 0; i < ab.entries.size(); ++i) {
        CHECK(ab.entries[i].index == ba.entries[i].index);
        CHECK(ab.entries[i].value == ba.entries[i].value);
    }
}

TEST_CASE("binary scaling keeps only signs") {
    auto c = words_only(8);
    c.tf_scaling = TfScaling::Binary;
    for (const auto& e : featurize("aa aa aa b", c).entries) CHECK(std::abs(e.value) == 1.0);
}

TEST_CASE("collision rate for disjoint n-gram sets at 2^26 dims") {
    // Direct simulation of the birthday bound: pairs of texts with 100
    // distinct word unigrams each and no shared n-gram.
    const auto c = words_only(26);
    DeterministicRng rng(99);
    const int pairs = 10000;
    int collided = 0;
    for (int p = 0; p < pairs; ++p) {
        std::string left, right;
        for (int i = 0; i < 100; ++i) {
            const auto token = std::to_string(rng.next());
            left += (i ? " L" : "L") + token;
            right += (i ? " R" : "R") + token;
        }
        const auto a = featurize(left, c);
        const auto b = featurize(right, c);
        std::set<std::uint32_t> seen;
        for (const auto& e : a.entries) seen.insert(e.index);
        bool overlap = false;
        for (const auto& e : b.entries) overlap |= seen.contains(e.index);
        collided += overlap ? 1 : 0;
    }
    const double rate = static_cast<double>(collided) / pairs;
    MESSAGE("pairs with an index collision: " << collided << " / " << pairs);
    CHECK(rate < 1e-3);
}

TEST_CASE("config validation and fingerprint") {
    FeaturizerConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.canonical() == "hash=xxh64;dims_log2=18;word_ngrams=1-1;char_ngrams=2-4;hash_seed=0;tf_scaling=log1p-count");
    CHECK(c.fingerprint() == xxh64(c.canonical()));

    auto bad = c;
    bad.dims_log2 = 7;
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad.dims_log2 = 27;
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = c;
    bad.word_ngrams = {2, 1};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = c;
    bad.char_ngrams = {0, 3};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = c;
    bad.word_ngrams = {0, 0};
    bad.char_ngrams = {0, 0};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = c;
    bad.char_ngrams = {0, 0};
    CHECK_NOTHROW(bad.validate());

    auto other = c;
    other.hash_seed = 1;
    CHECK(other.fingerprint() != c.fingerprint());
    CHECK(parse_tf_scaling("binary") == TfScaling::Binary);
    CHECK_FALSE(parse_tf_scaling("tfidf").has_value());
}

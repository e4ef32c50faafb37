#include <benchmark/benchmark.h>

#include <vitd/corpus.hpp>
#include <vitd/featurizer.hpp>

#include <string>

using namespace vitd;

namespace {

const std::string kBangla = "আজকের মিছিলে সবাই শান্তিপূর্ণ ছিল কিন্তু পরে কিছু লোক রাস্তায় ভাঙচুর শুরু করে "
                            "এবং পুলিশ তাদের ছত্রভঙ্গ করে দেয়";

void BM_Featurize(benchmark::State& state) {
    FeaturizerConfig cfg;
    cfg.dims_log2 = 18;
    cfg.word_ngrams = {1, 2};
    cfg.char_ngrams = {2, static_cast<std::uint32_t>(state.range(0))};
    for (auto _ : state) {
        auto fv = featurize(kBangla, cfg);
        benchmark::DoNotOptimize(fv.entries.data());
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(kBangla.size()));
}
BENCHMARK(BM_Featurize)->Arg(3)->Arg(5);

void BM_Normalize(benchmark::State& state) {
    for (auto _ : state) {
        auto s = normalize_text(kBangla);
        benchmark::DoNotOptimize(s.data());
    }
}
BENCHMARK(BM_Normalize);

} // namespace

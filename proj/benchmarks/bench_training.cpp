#include <benchmark/benchmark.h>

#include <vitd/linear_model.hpp>
#include <vitd/random.hpp>

#ifdef VITD_HAVE_FIXTURE
#include "synthetic.hpp"
#endif

using namespace vitd;

namespace {

void BM_AdamwStep(benchmark::State& state) {
    const auto dims = std::size_t{1} << state.range(0);
    DeterministicRng rng(1);
    auto params = ModelParams::zeros(dims);
    auto grads = ModelParams::zeros(dims);
    for (double& g : grads.weights) g = rng.uniform_unit() - 0.5;
    auto opt = OptimizerState::zeros(dims);
    TrainConfig cfg;
    for (auto _ : state) {
        adamw_step(params, grads, opt, cfg);
        benchmark::DoNotOptimize(params.weights.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(params.weights.size()));
}
BENCHMARK(BM_AdamwStep)->Arg(14)->Arg(18);

void BM_CrossEntropy(benchmark::State& state) {
    Logits z{0.3, -1.2, 2.5};
    for (auto _ : state) {
        auto ce = cross_entropy(z, LabelClass::PassiveViolence);
        benchmark::DoNotOptimize(ce.loss);
    }
}
BENCHMARK(BM_CrossEntropy);

#ifdef VITD_HAVE_FIXTURE
// One full run over the 300-example synthetic train split.
void BM_TrainSynthetic(benchmark::State& state) {
    fixture::CorpusOptions copts;
    copts.seed = 2;
    const auto split = fixture::make_corpus("bench", copts);
    FeaturizerConfig fc;
    fc.dims_log2 = static_cast<std::uint32_t>(state.range(0));
    TrainConfig tc;
    tc.learning_rate = 0.1;
    tc.epochs = 1;
    for (auto _ : state) {
        auto r = train(split, fc, tc);
        benchmark::DoNotOptimize(r.params.weights.data());
    }
}
BENCHMARK(BM_TrainSynthetic)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);
#endif

} // namespace

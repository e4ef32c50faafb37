#include <benchmark/benchmark.h>

#include <vitd/ensemble.hpp>
#include <vitd/random.hpp>

using namespace vitd;

namespace {

PredictionMatrix random_matrix(std::size_t models, std::size_t examples, std::uint64_t seed) {
    DeterministicRng rng(seed);
    std::vector<std::string> model_ids, example_ids;
    for (std::size_t i = 0; i < examples; ++i) example_ids.push_back("e" + std::to_string(i));
    std::vector<PredictionRecord> records;
    for (std::size_t m = 0; m < models; ++m) {
        model_ids.push_back("m" + std::to_string(m));
        for (const auto& id : example_ids)
            records.push_back(make_record(id, model_ids.back(), std::nullopt, kAllLabels[rng.uniform_below(3)]));
    }
    return assemble_matrix(records, model_ids, example_ids);
}

std::vector<LabelClass> random_gold(std::size_t n, std::uint64_t seed) {
    DeterministicRng rng(seed);
    std::vector<LabelClass> gold(n);
    for (auto& g : gold) g = kAllLabels[rng.uniform_below(3)];
    return gold;
}

void BM_HardVote(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto matrix = random_matrix(m, 2016, 1);
    for (auto _ : state) {
        auto out = ensemble_predict(matrix, {});
        benchmark::DoNotOptimize(out.labels.data());
    }
    state.SetItemsProcessed(state.iterations() * 2016);
}
BENCHMARK(BM_HardVote)->Arg(3)->Arg(5)->Arg(7);

void BM_WeightedVote(benchmark::State& state) {
    const auto matrix = random_matrix(5, 2016, 2);
    const WeightVector w(matrix.model_ids(), {0.3, 0.25, 0.2, 0.15, 0.1});
    for (auto _ : state) {
        auto out = ensemble_predict(matrix, {{}, VoteMode::Weighted}, w);
        benchmark::DoNotOptimize(out.labels.data());
    }
    state.SetItemsProcessed(state.iterations() * 2016);
}
BENCHMARK(BM_WeightedVote);

// Dev-sized grid search: 5 models, step 1/20 (10,626 points).
void BM_SearchWeights(benchmark::State& state) {
    const auto matrix = random_matrix(5, 1330, 3);
    const auto gold = random_gold(1330, 4);
    const auto threads = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto r = search_weights(matrix, gold, default_priority(5), {20, threads});
        benchmark::DoNotOptimize(r.best_dev_macro_f1);
    }
}
BENCHMARK(BM_SearchWeights)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Subsets(benchmark::State& state) {
    const auto matrix = random_matrix(5, 1330, 5);
    const auto gold = random_gold(1330, 6);
    for (auto _ : state) {
        auto rows = subset_ensembles(matrix, gold, default_priority(5));
        benchmark::DoNotOptimize(rows.data());
    }
}
BENCHMARK(BM_Subsets)->Unit(benchmark::kMillisecond);

} // namespace

#include <benchmark/benchmark.h>

#include "mfgfn/oracles.hpp"
#include "mfgfn/rng.hpp"

using namespace mfgfn;

static void BM_BraninEval(benchmark::State& state) {
    const OracleSet set = make_branin_oracles(100);
    Rng rng(1);
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const std::vector<int> idx{rng.uniform_int(100), rng.uniform_int(100)};
        benchmark::DoNotOptimize(set.eval(m, idx));
    }
}
BENCHMARK(BM_BraninEval)->DenseRange(1, 3, 1);

static void BM_Hartmann6Eval(benchmark::State& state) {
    const OracleSet set = make_hartmann6_oracles(10);
    Rng rng(1);
    for (auto _ : state) {
        std::vector<int> idx(6);
        for (auto& v : idx) v = rng.uniform_int(10);
        benchmark::DoNotOptimize(set.eval(3, idx));
    }
}
BENCHMARK(BM_Hartmann6Eval);

static void BM_EvaluateBatch(benchmark::State& state) {
    const OracleSet set = make_sequence_oracles(8);
    Rng rng(1);
    std::vector<std::pair<std::vector<int>, int>> queries;
    for (int i = 0; i < state.range(0); ++i) {
        std::vector<int> seq(8);
        for (auto& t : seq) t = rng.uniform_int(4);
        queries.emplace_back(std::move(seq), 1 + rng.uniform_int(2));
    }
    for (auto _ : state) {
        auto [ann, cost] = evaluate_batch(set, queries);
        benchmark::DoNotOptimize(cost);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateBatch)->Arg(64)->Arg(512);

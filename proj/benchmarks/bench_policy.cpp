#include <benchmark/benchmark.h>

#include "mfgfn/env.hpp"
#include "mfgfn/policy.hpp"
#include "mfgfn/rng.hpp"

using namespace mfgfn;

namespace {

Env branin_env() {
    EnvSpec spec;
    spec.kind = PayloadKind::Grid;
    spec.grid_dims = 2;
    spec.grid_side = 100;
    spec.n_fidelities = 3;
    return Env(spec);
}

}  // namespace

static void BM_SampleTrajectories(benchmark::State& state) {
    const Env env = branin_env();
    PolicyNet net(env.encoding_size(), 128, env.action_count(), 1);
    Rng rng(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            sample_trajectories(net, env, static_cast<int>(state.range(0)), 0.1, rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleTrajectories)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_TrainMinibatch(benchmark::State& state) {
    const Env env = branin_env();
    PolicyNet net(env.encoding_size(), 128, env.action_count(), 1);
    TrainConfig cfg;
    cfg.trajectories_per_round = 32;  // one minibatch per train() call
    cfg.minibatch_size = 32;
    Rng rng(4);
    const auto reward = [](const std::vector<int>& p, int m) {
        return 0.1 + p[0] + p[1] + m;
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(net, env, reward, cfg, rng));
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TrainMinibatch)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

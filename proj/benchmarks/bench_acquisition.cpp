#include <benchmark/benchmark.h>

#include <memory>

#include "mfgfn/acquisition.hpp"
#include "mfgfn/oracles.hpp"
#include "mfgfn/rng.hpp"

using namespace mfgfn;

namespace {

struct Setup {
    std::unique_ptr<MfGpModel> model;
    std::vector<Cost> costs{Cost::parse("0.01"), Cost::parse("0.1"),
                            Cost::parse("1")};
    MaxValueSamples samples;

    Setup() {
        const OracleSet set = make_branin_oracles(100);
        Rng rng(3);
        const int n = 128;
        Eigen::MatrixXd X(n, 2);
        Eigen::VectorXd m(n), y(n);
        for (int i = 0; i < n; ++i) {
            const std::vector<int> idx{rng.uniform_int(100), rng.uniform_int(100)};
            const int fid = 1 + rng.uniform_int(3);
            X(i, 0) = idx[0] / 99.0;
            X(i, 1) = idx[1] / 99.0;
            m[i] = fidelity_to_norm(fid, 3);
            y[i] = set.eval(fid, idx);
        }
        SurrogateConfig cfg;
        cfg.fit_iters = 30;
        cfg.fit_restarts = 0;
        model = std::make_unique<MfGpModel>(MfGpModel::fit(X, m, y, cfg, 1));
        samples.values = {0.5, 0.8, 1.1, 1.4, 0.9, 1.0, 0.7, 1.2, 0.6, 1.3};
    }
};

}  // namespace

static void BM_ScoreBatch(benchmark::State& state) {
    const Setup setup;
    Rng rng(5);
    std::vector<AcqCandidate> cands;
    for (int i = 0; i < state.range(0); ++i) {
        Eigen::VectorXd x(2);
        x << rng.uniform(), rng.uniform();
        cands.push_back({x, 1 + rng.uniform_int(3)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            score_batch(*setup.model, cands, setup.samples, setup.costs));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreBatch)->Arg(30)->Arg(300)->Unit(benchmark::kMillisecond);

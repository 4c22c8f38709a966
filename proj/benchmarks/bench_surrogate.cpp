#include <benchmark/benchmark.h>

#include "mfgfn/oracles.hpp"
#include "mfgfn/rng.hpp"
#include "mfgfn/surrogate.hpp"

using namespace mfgfn;

namespace {

void make_data(int n, Eigen::MatrixXd& X, Eigen::VectorXd& m, Eigen::VectorXd& y) {
    const OracleSet set = make_branin_oracles(100);
    Rng rng(7);
    X.resize(n, 2);
    m.resize(n);
    y.resize(n);
    for (int i = 0; i < n; ++i) {
        const std::vector<int> idx{rng.uniform_int(100), rng.uniform_int(100)};
        const int fid = 1 + rng.uniform_int(3);
        X(i, 0) = idx[0] / 99.0;
        X(i, 1) = idx[1] / 99.0;
        m[i] = fidelity_to_norm(fid, 3);
        y[i] = set.eval(fid, idx);
    }
}

}  // namespace

static void BM_GpFit(benchmark::State& state) {
    Eigen::MatrixXd X;
    Eigen::VectorXd m, y;
    make_data(static_cast<int>(state.range(0)), X, m, y);
    SurrogateConfig cfg;
    cfg.fit_iters = 50;
    cfg.fit_restarts = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(MfGpModel::fit(X, m, y, cfg, 1));
    }
}
BENCHMARK(BM_GpFit)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_GpPosterior(benchmark::State& state) {
    Eigen::MatrixXd X;
    Eigen::VectorXd m, y;
    make_data(256, X, m, y);
    SurrogateConfig cfg;
    cfg.fit_iters = 30;
    cfg.fit_restarts = 0;
    const MfGpModel model = MfGpModel::fit(X, m, y, cfg, 1);
    Eigen::MatrixXd Xq;
    Eigen::VectorXd mq, yq;
    make_data(static_cast<int>(state.range(0)), Xq, mq, yq);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.posterior(Xq, mq));
    }
}
BENCHMARK(BM_GpPosterior)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

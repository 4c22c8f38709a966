#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>

#include "mfgfn/errors.hpp"
#include "mfgfn/oracles.hpp"
#include "mfgfn/rng.hpp"
#include "mfgfn/surrogate.hpp"
#include "support/gp_reference.hpp"

using namespace mfgfn;

namespace {

MfKernelParams params_from(const gp_reference::Hypers& h) {
    MfKernelParams p;
    p.log_lengthscales = h.lengthscales.array().log();
    p.log_signal_var = std::log(h.signal_var);
    p.log_c = std::log(h.c);
    p.log_delta = std::log(h.delta);
    p.log_noise_var = std::log(h.noise_var);
    return p;
}

/// 20 multi-fidelity Branin annotations on normalized [0,1]^2 features.
void branin_data(int n, Eigen::MatrixXd& X, Eigen::VectorXd& m, Eigen::VectorXd& y,
                 std::uint64_t seed) {
    const OracleSet set = make_branin_oracles(100);
    Rng rng(seed);
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

TEST_CASE("fidelity kernel algebra") {
    CHECK(fidelity_kernel(1.0, 1.0, 0.7, 2.0) == doctest::Approx(0.7));
    // (1-0)^(1+delta) = 1 for every delta, so K2(0,0) = c + 1
    for (double delta : {1e-9, 0.5, 1.0, 3.0})
        CHECK(fidelity_kernel(0.0, 0.0, 0.7, delta) == doctest::Approx(1.7));

    MfKernelParams p;
    p.log_lengthscales = Eigen::VectorXd::Constant(3, std::log(0.4));
    p.log_signal_var = std::log(1.7);
    p.log_c = std::log(0.3);
    p.log_delta = std::log(1.2);
    p.log_noise_var = std::log(1e-3);
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd x(3);
        for (int i = 0; i < 3; ++i) x[i] = rng.uniform();
        const double mm = rng.uniform();
        // kernel(z, z) = signal_var * (c + (1-m)^(2(1+delta)))
        const double expect =
            1.7 * (0.3 + std::pow(1.0 - mm, 2.0 * (1.0 + 1.2)));
        CHECK(mf_kernel(x, mm, x, mm, p, XKernel::SquaredExponential) ==
              doctest::Approx(expect).epsilon(1e-12));

        // symmetry on random pairs
        Eigen::VectorXd x2(3);
        for (int i = 0; i < 3; ++i) x2[i] = rng.uniform();
        const double m2 = rng.uniform();
        CHECK(mf_kernel(x, mm, x2, m2, p, XKernel::SquaredExponential) ==
              doctest::Approx(mf_kernel(x2, m2, x, mm, p,
                                        XKernel::SquaredExponential))
                  .epsilon(1e-14));
        CHECK(mf_kernel(x, mm, x2, m2, p, XKernel::Matern52) ==
              doctest::Approx(mf_kernel(x2, m2, x, mm, p, XKernel::Matern52))
                  .epsilon(1e-14));
    }
}

TEST_CASE("random Gram matrices stay PSD within the jitter ladder") {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + rng.uniform_int(40);
        const int d = 1 + rng.uniform_int(4);
        Eigen::MatrixXd X(n, d);
        Eigen::VectorXd m(n), y(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) X(i, j) = rng.uniform();
            m[i] = rng.uniform_int(3) / 2.0;
            y[i] = rng.normal();
        }
        SurrogateConfig cfg;
        cfg.fit_iters = 20;
        cfg.fit_restarts = 0;
        const MfGpModel model = MfGpModel::fit(X, m, y, cfg, 1000 + trial);
        CHECK(model.jitter_used() <= 1e-4);
        CHECK(std::isfinite(model.log_marginal_likelihood()));
    }
}

TEST_CASE("single-point dataset interpolates") {
    Eigen::MatrixXd X(1, 2);
    X << 0.3, 0.7;
    Eigen::VectorXd m(1), y(1);
    m << 1.0;
    y << 4.2;
    SurrogateConfig cfg;
    cfg.fit_iters = 0;
    MfKernelParams p;
    p.log_lengthscales = Eigen::VectorXd::Constant(2, std::log(0.5));
    p.log_signal_var = 0.0;
    p.log_c = 0.0;
    p.log_delta = 0.0;
    p.log_noise_var = std::log(1e-10);
    cfg.initial_params = p;
    const MfGpModel model = MfGpModel::fit(X, m, y, cfg, 0);
    const Posterior post = model.posterior(X, m);
    CHECK(post.mean[0] == doctest::Approx(4.2).epsilon(1e-6));
    CHECK(post.variance[0] < 1e-6);
}

TEST_CASE("Cholesky posterior equals the dense-inverse reference at 1e-8") {
    Eigen::MatrixXd X;
    Eigen::VectorXd m, y;
    branin_data(20, X, m, y, 1234);

    gp_reference::Hypers h;
    h.lengthscales = Eigen::VectorXd::Constant(2, 0.35);
    h.signal_var = 1.4;
    h.c = 0.8;
    h.delta = 1.1;
    h.noise_var = 1e-4;

    SurrogateConfig cfg;
    cfg.fit_iters = 0;
    cfg.initial_params = params_from(h);
    const MfGpModel model = MfGpModel::fit(X, m, y, cfg, 0);
    REQUIRE(model.jitter_used() == 0.0);

    // compare in standardized units, like the model computes internally
    const double mean_y = y.mean();
    const double sd_y = std::sqrt((y.array() - mean_y).square().sum() / y.size());
    const Eigen::VectorXd y_std = (y.array() - mean_y) / sd_y;

    Rng rng(99);
    const int q = 17;
    Eigen::MatrixXd Xq(q, 2);
    Eigen::VectorXd mq(q);
    for (int i = 0; i < q; ++i) {
        Xq(i, 0) = rng.uniform();
        Xq(i, 1) = rng.uniform();
        mq[i] = rng.uniform_int(3) / 2.0;
    }

    const Posterior post = model.posterior(Xq, mq, /*standardized=*/true,
                                           /*with_covariance=*/true);
    const auto ref = gp_reference::posterior(X, m, y_std, Xq, mq, h);
    for (int i = 0; i < q; ++i) {
        CHECK(std::abs(post.mean[i] - ref.mean[i]) < 1e-8);
        CHECK(std::abs(post.variance[i] - ref.cov(i, i)) < 1e-8);
        for (int j = 0; j < q; ++j)
            CHECK(std::abs(post.cross_covariance(i, j) - ref.cov(i, j)) < 1e-8);
    }
}

TEST_CASE("log marginal likelihood gradient matches central differences") {
    for (XKernel kind : {XKernel::SquaredExponential, XKernel::Matern52}) {
        Eigen::MatrixXd X;
        Eigen::VectorXd m, y;
        branin_data(10, X, m, y, 555);
        const double mean_y = y.mean();
        const double sd_y = std::sqrt((y.array() - mean_y).square().sum() / y.size());
        const Eigen::VectorXd y_std = (y.array() - mean_y) / sd_y;

        MfKernelParams p;
        p.log_lengthscales = Eigen::VectorXd::Constant(2, std::log(0.4));
        p.log_signal_var = std::log(0.9);
        p.log_c = std::log(1.3);
        p.log_delta = std::log(0.8);
        p.log_noise_var = std::log(3e-3);

        Eigen::VectorXd grad;
        const double base =
            log_marginal_likelihood(X, m, y_std, p, kind, 0.0, 0.0, &grad);
        REQUIRE(std::isfinite(base));

        const double hstep = 1e-5;
        Eigen::VectorXd v = p.to_vector();
        for (int k = 0; k < v.size(); ++k) {
            Eigen::VectorXd vp = v, vm = v;
            vp[k] += hstep;
            vm[k] -= hstep;
            const double lp = log_marginal_likelihood(
                X, m, y_std, MfKernelParams::from_vector(vp, 2), kind, 0.0, 0.0);
            const double lm = log_marginal_likelihood(
                X, m, y_std, MfKernelParams::from_vector(vm, 2), kind, 0.0, 0.0);
            const double fd = (lp - lm) / (2.0 * hstep);
            const double scale = std::max({std::abs(fd), std::abs(grad[k]), 1.0});
            CHECK(std::abs(grad[k] - fd) / scale < 1e-4);
        }
    }
}

TEST_CASE("prior mode and variance shrinkage") {
    MfKernelParams p;
    p.log_lengthscales = Eigen::VectorXd::Constant(2, std::log(0.5));
    p.log_signal_var = std::log(2.0);
    p.log_c = std::log(0.6);
    p.log_delta = std::log(1.0);
    p.log_noise_var = std::log(1e-4);
    SurrogateConfig cfg;
    const MfGpModel prior = MfGpModel::prior(p, cfg);

    Eigen::MatrixXd Xq(1, 2);
    Xq << 0.2, 0.9;
    Eigen::VectorXd mq(1);
    mq << 0.5;
    const Posterior pr = prior.posterior(Xq, mq);
    CHECK(pr.mean[0] == doctest::Approx(0.0));
    const Eigen::VectorXd x0 = Xq.row(0).transpose();
    CHECK(pr.variance[0] ==
          doctest::Approx(mf_kernel(x0, 0.5, x0, 0.5, p, cfg.x_kernel)));

    // posterior variance never exceeds prior variance
    Eigen::MatrixXd X;
    Eigen::VectorXd m, y;
    branin_data(25, X, m, y, 31);
    cfg.fit_iters = 0;
    cfg.initial_params = p;
    const MfGpModel model = MfGpModel::fit(X, m, y, cfg, 0);
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        Eigen::MatrixXd q(1, 2);
        q << rng.uniform(), rng.uniform();
        Eigen::VectorXd qm(1);
        qm << rng.uniform_int(3) / 2.0;
        const Posterior post = model.posterior(q, qm, /*standardized=*/true);
        const Eigen::VectorXd qx = q.row(0).transpose();
        const double prior_var = mf_kernel(qx, qm[0], qx, qm[0], p, cfg.x_kernel);
        CHECK(post.variance[0] <= prior_var + 1e-10);
    }
}

TEST_CASE("interpolation at a training point with tiny noise") {
    Eigen::MatrixXd X;
    Eigen::VectorXd m, y;
    branin_data(12, X, m, y, 7);
    MfKernelParams p;
    p.log_lengthscales = Eigen::VectorXd::Constant(2, std::log(0.3));
    p.log_signal_var = 0.0;
    p.log_c = 0.0;
    p.log_delta = 0.0;
    p.log_noise_var = std::log(1e-10);
    SurrogateConfig cfg;
    cfg.fit_iters = 0;
    cfg.initial_params = p;
    const MfGpModel model = MfGpModel::fit(X, m, y, cfg, 0);
    const Posterior post = model.posterior(X, m);
    for (int i = 0; i < y.size(); ++i)
        CHECK(std::abs(post.mean[i] - y[i]) <
              1e-4 * std::max(1.0, std::abs(y[i])));
}

TEST_CASE("posterior correlation: self, degenerate kernel, dense oracle") {
    Eigen::MatrixXd X;
    Eigen::VectorXd m, y;
    branin_data(15, X, m, y, 444);

    gp_reference::Hypers h;
    h.lengthscales = Eigen::VectorXd::Constant(2, 0.4);
    h.signal_var = 1.0;
    h.c = 0.5;
    h.delta = 1.3;
    h.noise_var = 1e-4;
    SurrogateConfig cfg;
    cfg.fit_iters = 0;
    cfg.initial_params = params_from(h);
    const MfGpModel model = MfGpModel::fit(X, m, y, cfg, 0);

    Eigen::VectorXd x(2);
    x << 0.42, 0.17;
    // m = M: self correlation (up to the clamp)
    CHECK(model.posterior_correlation(x, 1.0) == doctest::Approx(1.0).epsilon(1e-6));

    // c -> infinity makes K2 effectively constant. The prior correlation
    // goes to 1 exactly; the posterior correlation moves monotonically
    // toward 1 as c grows (the shared component dominates the g-part).
    gp_reference::Hypers hc = h;
    hc.c = 1e6;
    SurrogateConfig cfg_c;
    cfg_c.fit_iters = 0;
    cfg_c.initial_params = params_from(hc);
    const MfGpModel prior_c = MfGpModel::prior(*cfg_c.initial_params, cfg_c);
    const MfGpModel model_c = MfGpModel::fit(X, m, y, cfg_c, 0);
    for (double mm : {0.0, 0.5}) {
        CHECK(prior_c.posterior_correlation(x, mm) > 1.0 - 1e-5);
        CHECK(model_c.posterior_correlation(x, mm) >
              model.posterior_correlation(x, mm));
        CHECK(model_c.posterior_correlation(x, mm) > 0.98);
    }

    // dense-oracle cross-check of the correlation value
    const double mean_y = y.mean();
    const double sd_y = std::sqrt((y.array() - mean_y).square().sum() / y.size());
    const Eigen::VectorXd y_std = (y.array() - mean_y) / sd_y;
    for (double mm : {0.0, 0.5}) {
        Eigen::MatrixXd Xq(2, 2);
        Xq.row(0) = x.transpose();
        Xq.row(1) = x.transpose();
        Eigen::VectorXd mq(2);
        mq << mm, 1.0;
        const auto ref = gp_reference::posterior(X, m, y_std, Xq, mq, h);
        const double rho_ref =
            ref.cov(0, 1) / std::sqrt(ref.cov(0, 0) * ref.cov(1, 1));
        CHECK(model.posterior_correlation(x, mm) ==
              doctest::Approx(rho_ref).epsilon(1e-8));
    }
}

TEST_CASE("standardization round-trip preserves the top-ranked query") {
    Eigen::MatrixXd X;
    Eigen::VectorXd m, y;
    branin_data(30, X, m, y, 2024);
    // scale/shift the targets; ML-II should adapt and keep the argmax stable
    const Eigen::VectorXd y_scaled = 37.0 * y.array() + 1234.5;

    SurrogateConfig cfg;
    cfg.fit_iters = 80;
    cfg.fit_restarts = 1;
    const MfGpModel a = MfGpModel::fit(X, m, y, cfg, 5);
    const MfGpModel b = MfGpModel::fit(X, m, y_scaled, cfg, 5);

    Rng rng(3);
    const int q = 50;
    Eigen::MatrixXd Xq(q, 2);
    Eigen::VectorXd mq = Eigen::VectorXd::Ones(q);
    for (int i = 0; i < q; ++i) {
        Xq(i, 0) = rng.uniform();
        Xq(i, 1) = rng.uniform();
    }
    const Posterior pa = a.posterior(Xq, mq);
    const Posterior pb = b.posterior(Xq, mq);
    int arg_a = 0, arg_b = 0;
    pa.mean.maxCoeff(&arg_a);
    pb.mean.maxCoeff(&arg_b);
    CHECK(arg_a == arg_b);
}

TEST_CASE("model snapshots round-trip through JSON") {
    Eigen::MatrixXd X;
    Eigen::VectorXd m, y;
    branin_data(10, X, m, y, 9);
    SurrogateConfig cfg;
    cfg.fit_iters = 30;
    cfg.fit_restarts = 0;
    const MfGpModel model = MfGpModel::fit(X, m, y, cfg, 77);
    const MfGpModel restored = MfGpModel::from_json(model.to_json());

    Eigen::MatrixXd Xq(3, 2);
    Xq << 0.1, 0.2, 0.5, 0.6, 0.9, 0.1;
    Eigen::VectorXd mq(3);
    mq << 0.0, 0.5, 1.0;
    const Posterior p1 = model.posterior(Xq, mq);
    const Posterior p2 = restored.posterior(Xq, mq);
    for (int i = 0; i < 3; ++i) {
        CHECK(p1.mean[i] == doctest::Approx(p2.mean[i]).epsilon(1e-12));
        CHECK(p1.variance[i] == doctest::Approx(p2.variance[i]).epsilon(1e-12));
    }
}

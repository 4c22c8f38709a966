#include "mfgfn/surrogate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfgfn/errors.hpp"
#include "mfgfn/rng.hpp"

namespace mfgfn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct ParamBox {
    double lo, hi;
};
constexpr ParamBox kLsBox{-7.0, 7.0};
constexpr ParamBox kSvBox{-9.0, 9.0};
constexpr ParamBox kCBox{-9.0, 9.0};
constexpr ParamBox kDeltaBox{-6.0, 6.0};
constexpr ParamBox kNoiseBox{-18.42068074395237, 4.605170185988092};  // [1e-8, 1e2]

double clampv(double v, ParamBox box) { return std::clamp(v, box.lo, box.hi); }

void clamp_params(MfKernelParams& p) {
    for (int i = 0; i < p.log_lengthscales.size(); ++i)
        p.log_lengthscales[i] = clampv(p.log_lengthscales[i], kLsBox);
    p.log_signal_var = clampv(p.log_signal_var, kSvBox);
    p.log_c = clampv(p.log_c, kCBox);
    p.log_delta = clampv(p.log_delta, kDeltaBox);
    p.log_noise_var = clampv(p.log_noise_var, kNoiseBox);
}

/// (1 - m)^(1+delta) with the m = 1 boundary mapped to exactly 0.
double fid_g(double m, double delta) {
    const double u = std::max(1.0 - m, 0.0);
    if (u == 0.0) return 0.0;
    return std::pow(u, 1.0 + delta);
}

struct KernelPieces {
    Eigen::MatrixXd k1;       // signal_var * stationary part, n x n
    Eigen::MatrixXd k_full;   // k1 .* k2 (no noise)
    Eigen::MatrixXd r;        // Matern scaled distances (empty for SE)
    Eigen::VectorXd g;        // per-point fidelity factor (1-m)^(1+delta)
};

KernelPieces build_kernel(const Eigen::MatrixXd& X, const Eigen::VectorXd& m,
                          const MfKernelParams& p, XKernel kind) {
    const int n = static_cast<int>(X.rows());
    const Eigen::VectorXd inv_ls = (-p.log_lengthscales.array()).exp();
    const double sv = std::exp(p.log_signal_var);
    const double c = std::exp(p.log_c);
    const double delta = std::exp(p.log_delta);

    KernelPieces kp;
    kp.g.resize(n);
    for (int i = 0; i < n; ++i) kp.g[i] = fid_g(m[i], delta);

    // Scaled inputs make the pair loop a plain squared distance.
    const Eigen::MatrixXd Xs = X * inv_ls.asDiagonal();
    kp.k1.resize(n, n);
    if (kind == XKernel::Matern52) kp.r.resize(n, n);
    for (int i = 0; i < n; ++i) {
        kp.k1(i, i) = sv;
        if (kind == XKernel::Matern52) kp.r(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double d2 = (Xs.row(i) - Xs.row(j)).squaredNorm();
            double v;
            if (kind == XKernel::SquaredExponential) {
                v = sv * std::exp(-0.5 * d2);
            } else {
                const double r = std::sqrt(d2);
                const double sr = std::sqrt(5.0) * r;
                v = sv * (1.0 + sr + 5.0 * d2 / 3.0) * std::exp(-sr);
                kp.r(i, j) = kp.r(j, i) = r;
            }
            kp.k1(i, j) = kp.k1(j, i) = v;
        }
    }
    kp.k_full.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            kp.k_full(i, j) = kp.k1(i, j) * (c + kp.g[i] * kp.g[j]);
    return kp;
}

/// Cholesky with jitter escalation: no jitter first, then
/// jitter_start * 10^k up to jitter_max. Returns the jitter used or -1.
double chol_with_jitter(const Eigen::MatrixXd& K, double jitter_start, double jitter_max,
                        Eigen::LLT<Eigen::MatrixXd>& llt) {
    llt.compute(K);
    if (llt.info() == Eigen::Success) return 0.0;
    for (double jitter = jitter_start; jitter <= jitter_max * (1.0 + 1e-12);
         jitter *= 10.0) {
        Eigen::MatrixXd Kj = K;
        Kj.diagonal().array() += jitter;
        llt.compute(Kj);
        if (llt.info() == Eigen::Success) return jitter;
    }
    return -1.0;
}

struct Adam {
    Eigen::VectorXd m, v;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    int t = 0;

    explicit Adam(int n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

    Eigen::VectorXd step(const Eigen::VectorXd& grad, double lr) {
        ++t;
        m = beta1 * m + (1.0 - beta1) * grad;
        v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad).eval();
        const double bc1 = 1.0 - std::pow(beta1, t);
        const double bc2 = 1.0 - std::pow(beta2, t);
        return (lr / bc1) * m.cwiseQuotient(((v / bc2).cwiseSqrt().array() + eps).matrix());
    }
};

}  // namespace

Eigen::VectorXd MfKernelParams::to_vector() const {
    Eigen::VectorXd v(size());
    v.head(log_lengthscales.size()) = log_lengthscales;
    const int d = static_cast<int>(log_lengthscales.size());
    v[d] = log_signal_var;
    v[d + 1] = log_c;
    v[d + 2] = log_delta;
    v[d + 3] = log_noise_var;
    return v;
}

MfKernelParams MfKernelParams::from_vector(const Eigen::VectorXd& v, int input_dim) {
    MfKernelParams p;
    p.log_lengthscales = v.head(input_dim);
    p.log_signal_var = v[input_dim];
    p.log_c = v[input_dim + 1];
    p.log_delta = v[input_dim + 2];
    p.log_noise_var = v[input_dim + 3];
    return p;
}

double fidelity_to_norm(int m, int n_fidelities) {
    if (n_fidelities <= 1) return 1.0;
    return static_cast<double>(m - 1) / static_cast<double>(n_fidelities - 1);
}

double fidelity_kernel(double m1, double m2, double c, double delta) {
    return c + fid_g(m1, delta) * fid_g(m2, delta);
}

double mf_kernel(const Eigen::VectorXd& x1, double m1, const Eigen::VectorXd& x2,
                 double m2, const MfKernelParams& params, XKernel kind) {
    const Eigen::VectorXd inv_ls = (-params.log_lengthscales.array()).exp();
    const double sv = std::exp(params.log_signal_var);
    const double d2 = ((x1 - x2).cwiseProduct(inv_ls)).squaredNorm();
    double k1;
    if (kind == XKernel::SquaredExponential) {
        k1 = sv * std::exp(-0.5 * d2);
    } else {
        const double r = std::sqrt(d2);
        const double sr = std::sqrt(5.0) * r;
        k1 = sv * (1.0 + sr + 5.0 * d2 / 3.0) * std::exp(-sr);
    }
    const double c = std::exp(params.log_c);
    const double delta = std::exp(params.log_delta);
    return k1 * fidelity_kernel(m1, m2, c, delta);
}

double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& m_norm,
                               const Eigen::VectorXd& y, const MfKernelParams& params,
                               XKernel kind, double jitter_start, double jitter_max,
                               Eigen::VectorXd* grad) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    const double noise = std::exp(params.log_noise_var);

    const KernelPieces kp = build_kernel(X, m_norm, params, kind);
    Eigen::MatrixXd Kn = kp.k_full;
    Kn.diagonal().array() += noise;

    Eigen::LLT<Eigen::MatrixXd> llt;
    const double jitter = chol_with_jitter(Kn, jitter_start, jitter_max, llt);
    if (jitter < 0.0) {
        if (grad) grad->setZero(params.size());
        return kNegInf;
    }

    const Eigen::VectorXd alpha = llt.solve(y);
    const Eigen::MatrixXd L = llt.matrixL();
    double lml = -0.5 * y.dot(alpha);
    for (int i = 0; i < n; ++i) lml -= std::log(L(i, i));
    lml -= 0.5 * n * std::log(2.0 * std::numbers::pi);

    if (!grad) return lml;

    // d lml / d theta = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta)
    Eigen::MatrixXd A = -llt.solve(Eigen::MatrixXd::Identity(n, n));
    A.noalias() += alpha * alpha.transpose();

    grad->setZero(params.size());
    const double sv = std::exp(params.log_signal_var);
    const double c = std::exp(params.log_c);
    const double delta = std::exp(params.log_delta);
    const Eigen::VectorXd inv_ls2 = (-2.0 * params.log_lengthscales.array()).exp();

    std::vector<double> log_u(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double u = std::max(1.0 - m_norm[i], 0.0);
        log_u[i] = u > 0.0 ? std::log(u) : 0.0;
    }

    double g_sv = 0.0, g_c = 0.0, g_delta = 0.0, g_noise = 0.0;
    Eigen::VectorXd g_ls = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < n; ++i) {
        g_noise += A(i, i);
        for (int j = 0; j < n; ++j) {
            const double a = A(i, j);
            const double k2 = c + kp.g[i] * kp.g[j];
            g_sv += a * kp.k_full(i, j);
            g_c += a * kp.k1(i, j) * c;
            if (kp.g[i] > 0.0 && kp.g[j] > 0.0)
                g_delta += a * kp.k1(i, j) * kp.g[i] * kp.g[j] *
                           (log_u[i] + log_u[j]) * delta;
            // lengthscale terms
            if (kind == XKernel::SquaredExponential) {
                const double w = a * kp.k_full(i, j);
                for (int dd = 0; dd < d; ++dd) {
                    const double diff = X(i, dd) - X(j, dd);
                    g_ls[dd] += w * diff * diff * inv_ls2[dd];
                }
            } else {
                const double r = kp.r(i, j);
                const double sr = std::sqrt(5.0) * r;
                const double factor = (5.0 / 3.0) * sv * (1.0 + sr) * std::exp(-sr);
                const double w = a * k2 * factor;
                for (int dd = 0; dd < d; ++dd) {
                    const double diff = X(i, dd) - X(j, dd);
                    g_ls[dd] += w * diff * diff * inv_ls2[dd];
                }
            }
        }
    }
    grad->head(d) = 0.5 * g_ls;
    (*grad)[d] = 0.5 * g_sv;
    (*grad)[d + 1] = 0.5 * g_c;
    (*grad)[d + 2] = 0.5 * g_delta;
    (*grad)[d + 3] = 0.5 * g_noise * noise;
    return lml;
}

MfGpModel MfGpModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& m_norm,
                         const Eigen::VectorXd& y, const SurrogateConfig& config,
                         std::uint64_t seed) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    if (n < 1) throw Error("MfGpModel::fit: need at least one annotation");
    if (m_norm.size() != n || y.size() != n)
        throw Error("MfGpModel::fit: input sizes disagree");

    MfGpModel model;
    model.kind_ = config.x_kernel;
    model.X_ = X;
    model.m_ = m_norm;
    model.y_mean_ = y.mean();
    const double var = (y.array() - model.y_mean_).square().sum() / n;
    model.y_sd_ = var > 1e-24 ? std::sqrt(var) : 1.0;
    model.y_std_ = (y.array() - model.y_mean_) / model.y_sd_;

    // Hyperparameters are optimised on a subsample when n exceeds the cap.
    Rng rng = Rng(seed).fork(0x5u);
    Eigen::MatrixXd Xfit = X;
    Eigen::VectorXd mfit = m_norm, yfit = model.y_std_;
    if (config.fit_subset_cap > 0 && n > config.fit_subset_cap) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        for (int i = 0; i < config.fit_subset_cap; ++i)
            std::swap(idx[i], idx[i + rng.uniform_int(n - i)]);
        idx.resize(config.fit_subset_cap);
        std::sort(idx.begin(), idx.end());
        const int ns = static_cast<int>(idx.size());
        Xfit.resize(ns, d);
        mfit.resize(ns);
        yfit.resize(ns);
        for (int i = 0; i < ns; ++i) {
            Xfit.row(i) = X.row(idx[i]);
            mfit[i] = m_norm[idx[i]];
            yfit[i] = model.y_std_[idx[i]];
        }
    }

    MfKernelParams base;
    if (config.initial_params) {
        base = *config.initial_params;
        if (base.log_lengthscales.size() != d)
            throw Error("MfGpModel::fit: initial lengthscales do not match input dim");
    } else {
        base.log_lengthscales = Eigen::VectorXd::Constant(d, std::log(0.5));
        base.log_signal_var = 0.0;
        base.log_c = 0.0;
        base.log_delta = 0.0;
        base.log_noise_var = std::log(1e-2);
    }

    MfKernelParams best = base;
    double best_lml = kNegInf;
    const int candidates = std::max(1, 1 + config.fit_restarts);
    for (int cand = 0; cand < candidates; ++cand) {
        MfKernelParams p = base;
        if (cand > 0) {
            Eigen::VectorXd v = p.to_vector();
            for (int i = 0; i < v.size(); ++i) v[i] += 0.7 * rng.normal();
            p = MfKernelParams::from_vector(v, d);
        }
        clamp_params(p);
        Adam adam(p.size());
        Eigen::VectorXd grad(p.size());
        for (int it = 0; it < config.fit_iters; ++it) {
            const double lml =
                mfgfn::log_marginal_likelihood(Xfit, mfit, yfit, p, config.x_kernel,
                                        config.jitter_start, config.jitter_max, &grad);
            if (!std::isfinite(lml) || !grad.allFinite()) break;
            Eigen::VectorXd v = p.to_vector() + adam.step(grad, config.fit_lr);
            p = MfKernelParams::from_vector(v, d);
            clamp_params(p);
        }
        const double final_lml =
            mfgfn::log_marginal_likelihood(Xfit, mfit, yfit, p, config.x_kernel,
                                    config.jitter_start, config.jitter_max, nullptr);
        if (final_lml > best_lml) {
            best_lml = final_lml;
            best = p;
        }
    }
    if (config.fit_iters == 0 && config.initial_params) best = base;

    model.params_ = best;
    model.condition(config.jitter_start, config.jitter_max);
    return model;
}

MfGpModel MfGpModel::prior(const MfKernelParams& params, const SurrogateConfig& config) {
    MfGpModel model;
    model.kind_ = config.x_kernel;
    model.params_ = params;
    model.X_.resize(0, params.log_lengthscales.size());
    model.m_.resize(0);
    model.y_std_.resize(0);
    model.chol_.resize(0, 0);
    model.alpha_.resize(0);
    return model;
}

void MfGpModel::condition(double jitter_start, double jitter_max) {
    const int n = train_size();
    const KernelPieces kp = build_kernel(X_, m_, params_, kind_);
    Eigen::MatrixXd Kn = kp.k_full;
    Kn.diagonal().array() += std::exp(params_.log_noise_var);
    Eigen::LLT<Eigen::MatrixXd> llt;
    const double jitter = chol_with_jitter(Kn, jitter_start, jitter_max, llt);
    if (jitter < 0.0)
        throw NumericalError("MfGpModel: Cholesky failed at maximum jitter");
    jitter_used_ = jitter;
    chol_ = llt.matrixL();
    alpha_ = llt.solve(y_std_);
    lml_ = -0.5 * y_std_.dot(alpha_);
    for (int i = 0; i < n; ++i) lml_ -= std::log(chol_(i, i));
    lml_ -= 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Eigen::MatrixXd MfGpModel::cross_kernel(const Eigen::MatrixXd& Xq,
                                        const Eigen::VectorXd& mq) const {
    const int q = static_cast<int>(Xq.rows());
    const int n = train_size();
    Eigen::MatrixXd Ks(q, n);
    const Eigen::VectorXd inv_ls = (-params_.log_lengthscales.array()).exp();
    const double sv = std::exp(params_.log_signal_var);
    const double c = std::exp(params_.log_c);
    const double delta = std::exp(params_.log_delta);
    const Eigen::MatrixXd Xqs = Xq * inv_ls.asDiagonal();
    const Eigen::MatrixXd Xts = X_ * inv_ls.asDiagonal();
    for (int i = 0; i < q; ++i) {
        const double gi = fid_g(mq[i], delta);
        for (int j = 0; j < n; ++j) {
            const double d2 = (Xqs.row(i) - Xts.row(j)).squaredNorm();
            double k1;
            if (kind_ == XKernel::SquaredExponential) {
                k1 = sv * std::exp(-0.5 * d2);
            } else {
                const double r = std::sqrt(d2);
                const double sr = std::sqrt(5.0) * r;
                k1 = sv * (1.0 + sr + 5.0 * d2 / 3.0) * std::exp(-sr);
            }
            Ks(i, j) = k1 * (c + gi * fid_g(m_[j], delta));
        }
    }
    return Ks;
}

Posterior MfGpModel::posterior(const Eigen::MatrixXd& Xq, const Eigen::VectorXd& mq,
                               bool standardized, bool with_covariance) const {
    const int q = static_cast<int>(Xq.rows());
    const double c = std::exp(params_.log_c);
    const double delta = std::exp(params_.log_delta);
    const double sv = std::exp(params_.log_signal_var);

    Posterior post;
    post.mean.resize(q);
    post.variance.resize(q);

    Eigen::VectorXd kss(q);
    for (int i = 0; i < q; ++i) {
        const double g = fid_g(mq[i], delta);
        kss[i] = sv * (c + g * g);
    }

    if (train_size() == 0) {
        post.mean.setZero();
        post.variance = kss;
        if (with_covariance) {
            post.cross_covariance.resize(q, q);
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j)
                    post.cross_covariance(i, j) = mf_kernel(
                        Xq.row(i).transpose(), mq[i], Xq.row(j).transpose(), mq[j],
                        params_, kind_);
        }
    } else {
        const Eigen::MatrixXd Ks = cross_kernel(Xq, mq);
        post.mean.noalias() = Ks * alpha_;
        const Eigen::MatrixXd V =
            chol_.triangularView<Eigen::Lower>().solve(Ks.transpose());
        for (int i = 0; i < q; ++i)
            post.variance[i] = std::max(kss[i] - V.col(i).squaredNorm(), 0.0);
        if (with_covariance) {
            Eigen::MatrixXd Kss(q, q);
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j)
                    Kss(i, j) = mf_kernel(Xq.row(i).transpose(), mq[i],
                                          Xq.row(j).transpose(), mq[j], params_, kind_);
            post.cross_covariance = Kss - V.transpose() * V;
        }
    }

    if (!standardized) {
        post.mean = (post.mean.array() * y_sd_ + y_mean_).matrix();
        post.variance *= y_sd_ * y_sd_;
        if (with_covariance) post.cross_covariance *= y_sd_ * y_sd_;
    }
    return post;
}

double MfGpModel::posterior_correlation(const Eigen::VectorXd& x, double m_norm) const {
    Eigen::MatrixXd Xq(2, x.size());
    Xq.row(0) = x.transpose();
    Xq.row(1) = x.transpose();
    Eigen::VectorXd mq(2);
    mq << m_norm, 1.0;
    const Posterior post = posterior(Xq, mq, /*standardized=*/true,
                                     /*with_covariance=*/true);
    const double c00 = std::max(post.cross_covariance(0, 0), 1e-18);
    const double c11 = std::max(post.cross_covariance(1, 1), 1e-18);
    double rho = post.cross_covariance(0, 1) / std::sqrt(c00 * c11);
    if (!std::isfinite(rho)) rho = 0.0;
    return std::clamp(rho, -1.0 + 1e-9, 1.0 - 1e-9);
}

PairStats MfGpModel::acquisition_stats(const Eigen::MatrixXd& Xq,
                                       const Eigen::VectorXd& mq) const {
    const int q = static_cast<int>(Xq.rows());
    const double c = std::exp(params_.log_c);
    const double delta = std::exp(params_.log_delta);
    const double sv = std::exp(params_.log_signal_var);

    // Interleave each query with its highest-fidelity twin (x, m = 1).
    Eigen::MatrixXd X2(2 * q, Xq.cols());
    Eigen::VectorXd m2(2 * q);
    for (int i = 0; i < q; ++i) {
        X2.row(2 * i) = Xq.row(i);
        X2.row(2 * i + 1) = Xq.row(i);
        m2[2 * i] = mq[i];
        m2[2 * i + 1] = 1.0;
    }

    PairStats stats;
    stats.mean.resize(q);
    stats.sd.resize(q);
    stats.rho.resize(q);

    Eigen::VectorXd kss(2 * q);
    for (int i = 0; i < 2 * q; ++i) {
        const double g = fid_g(m2[i], delta);
        kss[i] = sv * (c + g * g);
    }

    Eigen::VectorXd mean2 = Eigen::VectorXd::Zero(2 * q);
    Eigen::VectorXd var2 = kss;
    Eigen::VectorXd cross(q);
    if (train_size() == 0) {
        for (int i = 0; i < q; ++i) {
            const double g = fid_g(mq[i], delta);
            cross[i] = sv * (c + g * fid_g(1.0, delta));
        }
    } else {
        const Eigen::MatrixXd Ks = cross_kernel(X2, m2);
        mean2.noalias() = Ks * alpha_;
        const Eigen::MatrixXd V =
            chol_.triangularView<Eigen::Lower>().solve(Ks.transpose());
        for (int i = 0; i < 2 * q; ++i)
            var2[i] = std::max(kss[i] - V.col(i).squaredNorm(), 0.0);
        for (int i = 0; i < q; ++i) {
            const double g = fid_g(mq[i], delta);
            const double prior_cross = sv * (c + g * fid_g(1.0, delta));
            cross[i] = prior_cross - V.col(2 * i).dot(V.col(2 * i + 1));
        }
    }

    for (int i = 0; i < q; ++i) {
        stats.mean[i] = mean2[2 * i];
        stats.sd[i] = std::sqrt(std::max(var2[2 * i], 0.0));
        const double c00 = std::max(var2[2 * i], 1e-18);
        const double c11 = std::max(var2[2 * i + 1], 1e-18);
        double rho = cross[i] / std::sqrt(c00 * c11);
        if (!std::isfinite(rho)) rho = 0.0;
        stats.rho[i] = std::clamp(rho, -1.0 + 1e-9, 1.0 - 1e-9);
    }
    return stats;
}

double MfGpModel::log_marginal_likelihood() const { return lml_; }

std::string MfGpModel::to_json() const {
    nlohmann::json j;
    j["kernel"] = kind_ == XKernel::SquaredExponential ? "squared_exponential"
                                                       : "matern52";
    j["log_lengthscales"] =
        std::vector<double>(params_.log_lengthscales.begin(), params_.log_lengthscales.end());
    j["log_signal_var"] = params_.log_signal_var;
    j["log_c"] = params_.log_c;
    j["log_delta"] = params_.log_delta;
    j["log_noise_var"] = params_.log_noise_var;
    j["y_mean"] = y_mean_;
    j["y_sd"] = y_sd_;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < X_.rows(); ++i)
        rows.emplace_back(X_.row(i).begin(), X_.row(i).end());
    j["x"] = rows;
    j["m"] = std::vector<double>(m_.begin(), m_.end());
    j["y_std"] = std::vector<double>(y_std_.begin(), y_std_.end());
    return j.dump();
}

MfGpModel MfGpModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MfGpModel model;
    model.kind_ = j.at("kernel") == "matern52" ? XKernel::Matern52
                                               : XKernel::SquaredExponential;
    const auto ls = j.at("log_lengthscales").get<std::vector<double>>();
    model.params_.log_lengthscales =
        Eigen::Map<const Eigen::VectorXd>(ls.data(), ls.size());
    model.params_.log_signal_var = j.at("log_signal_var").get<double>();
    model.params_.log_c = j.at("log_c").get<double>();
    model.params_.log_delta = j.at("log_delta").get<double>();
    model.params_.log_noise_var = j.at("log_noise_var").get<double>();
    model.y_mean_ = j.at("y_mean").get<double>();
    model.y_sd_ = j.at("y_sd").get<double>();
    const auto rows = j.at("x").get<std::vector<std::vector<double>>>();
    const int n = static_cast<int>(rows.size());
    const int d = n > 0 ? static_cast<int>(rows[0].size())
                        : static_cast<int>(ls.size());
    model.X_.resize(n, d);
    for (int i = 0; i < n; ++i)
        model.X_.row(i) = Eigen::Map<const Eigen::VectorXd>(rows[i].data(), d);
    const auto mv = j.at("m").get<std::vector<double>>();
    model.m_ = Eigen::Map<const Eigen::VectorXd>(mv.data(), mv.size());
    const auto yv = j.at("y_std").get<std::vector<double>>();
    model.y_std_ = Eigen::Map<const Eigen::VectorXd>(yv.data(), yv.size());
    if (n > 0) model.condition(1e-8, 1e-4);
    return model;
}

}  // namespace mfgfn

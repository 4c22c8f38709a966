#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>

namespace mfgfn {

enum class XKernel { SquaredExponential, Matern52 };

/// Multi-fidelity kernel hyperparameters, stored in log space.
/// K(z1, z2) = K1(x1, x2) * K2(m1, m2) with
///   K1 = signal_var * stationary(x1, x2; lengthscales)
///   K2 = c + (1 - m1)^(1+delta) * (1 - m2)^(1+delta),  m in [0, 1].
struct MfKernelParams {
    Eigen::VectorXd log_lengthscales;
    double log_signal_var = 0.0;
    double log_c = 0.0;
    double log_delta = 0.0;
    double log_noise_var = -4.6051701859880914;  // log(1e-2)

    int size() const { return static_cast<int>(log_lengthscales.size()) + 4; }
    Eigen::VectorXd to_vector() const;
    static MfKernelParams from_vector(const Eigen::VectorXd& v, int input_dim);
};

struct SurrogateConfig {
    XKernel x_kernel = XKernel::SquaredExponential;
    int fit_iters = 200;
    int fit_restarts = 2;
    double fit_lr = 0.05;
    /// Hyperparameters are optimised on a random subsample when the training
    /// set exceeds this cap; the posterior always conditions on all points.
    int fit_subset_cap = 512;
    double jitter_start = 1e-8;
    double jitter_max = 1e-4;
    /// Optional explicit starting point (used with fit_iters = 0 to pin
    /// hyperparameters exactly, e.g. in equivalence tests).
    std::optional<MfKernelParams> initial_params;
};

/// Linear downsampling fidelity kernel K2(m1, m2) = c + (1-m1)^(1+d) (1-m2)^(1+d).
double fidelity_kernel(double m1, double m2, double c, double delta);

/// Full product kernel on z = (x, m_norm).
double mf_kernel(const Eigen::VectorXd& x1, double m1, const Eigen::VectorXd& x2,
                 double m2, const MfKernelParams& params, XKernel kind);

/// Log marginal likelihood of standardized targets under the given
/// hyperparameters; optionally fills the gradient with respect to the
/// log-space parameter vector. Returns -inf when the Cholesky fails at the
/// maximum jitter.
double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& m_norm,
                               const Eigen::VectorXd& y, const MfKernelParams& params,
                               XKernel kind, double jitter_start, double jitter_max,
                               Eigen::VectorXd* grad = nullptr);

struct Posterior {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;          // latent (noise-free), floored at 0
    Eigen::MatrixXd cross_covariance;  // filled only when requested
};

/// Per-query posterior mean/sd plus the posterior correlation of (x, m)
/// with (x, m = 1.0), in standardized units. Batched acquisition input.
struct PairStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
    Eigen::VectorXd rho;
};

/// Map a 1-based fidelity index onto the kernel's [0,1] scale:
/// m_norm = (m-1)/(M-1), and 1.0 when M == 1.
double fidelity_to_norm(int m, int n_fidelities);

/// Exact multi-fidelity GP conditioned on (x, m_norm) -> y observations.
/// Targets are standardized internally; posteriors are de-standardized
/// unless asked for in standardized units. A fitted model is immutable.
class MfGpModel {
public:
    /// Fit hyperparameters by ML-II (Adam in log space, restarts) and
    /// condition on the full training set. Requires n >= 1.
    static MfGpModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& m_norm,
                         const Eigen::VectorXd& y, const SurrogateConfig& config,
                         std::uint64_t seed);

    /// Prior-mode model with no observations.
    static MfGpModel prior(const MfKernelParams& params, const SurrogateConfig& config);

    Posterior posterior(const Eigen::MatrixXd& Xq, const Eigen::VectorXd& mq,
                        bool standardized = false, bool with_covariance = false) const;

    /// Correlation between latent f(x, m) and f(x, m=1.0) under the joint
    /// posterior, clamped to [-1 + 1e-9, 1 - 1e-9].
    double posterior_correlation(const Eigen::VectorXd& x, double m_norm) const;

    /// Batched (mean, sd, rho) triples for acquisition scoring. One kernel
    /// pass covers each query and its highest-fidelity twin.
    PairStats acquisition_stats(const Eigen::MatrixXd& Xq,
                                const Eigen::VectorXd& mq) const;

    /// Log marginal likelihood of the (standardized) training targets at the
    /// fitted hyperparameters.
    double log_marginal_likelihood() const;

    const MfKernelParams& params() const { return params_; }
    XKernel kernel_kind() const { return kind_; }
    int train_size() const { return static_cast<int>(y_std_.size()); }
    double y_mean() const { return y_mean_; }
    double y_sd() const { return y_sd_; }
    /// Jitter that was added to the noise diagonal (0 when none was needed).
    double jitter_used() const { return jitter_used_; }

    std::string to_json() const;
    static MfGpModel from_json(const std::string& text);

private:
    MfGpModel() = default;
    void condition(double jitter_start, double jitter_max);
    Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& Xq,
                                 const Eigen::VectorXd& mq) const;

    MfKernelParams params_;
    XKernel kind_ = XKernel::SquaredExponential;
    Eigen::MatrixXd X_;       // n x d
    Eigen::VectorXd m_;       // n
    Eigen::VectorXd y_std_;   // n, standardized
    double y_mean_ = 0.0;
    double y_sd_ = 1.0;
    Eigen::MatrixXd chol_;    // lower triangular L with L L^T = K + sigma^2 I
    Eigen::VectorXd alpha_;   // (K + sigma^2 I)^{-1} y_std
    double jitter_used_ = 0.0;
    double lml_ = 0.0;
};

}  // namespace mfgfn

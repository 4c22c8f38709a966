#pragma once

// Test-only dense reference for the multi-fidelity GP: a from-the-formulas
// evaluation of the posterior using explicit matrix inversion. Kept fully
// independent of the library's Cholesky path (separate kernel code, no
// shared helpers) so the two routes can be compared.

#include <Eigen/Dense>
#include <cmath>

namespace gp_reference {

struct Hypers {
    Eigen::VectorXd lengthscales;  // natural units
    double signal_var;
    double c;
    double delta;
    double noise_var;
};

inline double kernel(const Eigen::VectorXd& x1, double m1, const Eigen::VectorXd& x2,
                     double m2, const Hypers& h) {
    double d2 = 0.0;
    for (int i = 0; i < x1.size(); ++i) {
        const double d = (x1[i] - x2[i]) / h.lengthscales[i];
        d2 += d * d;
    }
    const double k1 = h.signal_var * std::exp(-0.5 * d2);
    const double u1 = std::max(1.0 - m1, 0.0);
    const double u2 = std::max(1.0 - m2, 0.0);
    const double g1 = u1 > 0.0 ? std::pow(u1, 1.0 + h.delta) : 0.0;
    const double g2 = u2 > 0.0 ? std::pow(u2, 1.0 + h.delta) : 0.0;
    return k1 * (h.c + g1 * g2);
}

struct PosteriorRef {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // latent covariance between the queries
};

/// mu_n(z) = K(z, Z)(K(Z,Z) + s^2 I)^{-1} y  and
/// K_n(z1, z2) = K(z1, z2) - K(z1, Z)(K(Z,Z) + s^2 I)^{-1} K(Z, z2),
/// evaluated with a dense inverse.
inline PosteriorRef posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& m,
                              const Eigen::VectorXd& y, const Eigen::MatrixXd& Xq,
                              const Eigen::VectorXd& mq, const Hypers& h) {
    const int n = static_cast<int>(X.rows());
    const int q = static_cast<int>(Xq.rows());
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            K(i, j) = kernel(X.row(i).transpose(), m[i], X.row(j).transpose(), m[j], h);
    K.diagonal().array() += h.noise_var;
    const Eigen::MatrixXd Kinv = K.inverse();

    Eigen::MatrixXd Ks(q, n);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < n; ++j)
            Ks(i, j) =
                kernel(Xq.row(i).transpose(), mq[i], X.row(j).transpose(), m[j], h);
    Eigen::MatrixXd Kss(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            Kss(i, j) =
                kernel(Xq.row(i).transpose(), mq[i], Xq.row(j).transpose(), mq[j], h);

    PosteriorRef out;
    out.mean = Ks * Kinv * y;
    out.cov = Kss - Ks * Kinv * Ks.transpose();
    return out;
}

}  // namespace gp_reference

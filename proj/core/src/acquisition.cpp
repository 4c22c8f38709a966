#include "mfgfn/acquisition.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfgfn/errors.hpp"

namespace mfgfn {

namespace {

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double normal_hazard(double gamma) {
    if (gamma < -6.0) {
        // Mills-ratio expansion with t = -gamma:
        // phi/Phi ~ t / (1 - 1/t^2 + 3/t^4 - 15/t^6 + 105/t^8)
        const double t = -gamma;
        const double t2 = t * t;
        const double t4 = t2 * t2;
        return t / (1.0 - 1.0 / t2 + 3.0 / t4 - 15.0 / (t4 * t2) + 105.0 / (t4 * t4));
    }
    return normal_pdf(gamma) / normal_cdf(gamma);
}

double gibbon_information_gain(double mean, double sd, double rho,
                               const MaxValueSamples& samples) {
    if (samples.values.empty()) throw EmptySetError("gibbon: no max-value samples");
    if (!(sd > 0.0)) return 0.0;
    const double rho2 = rho * rho;
    double total = 0.0;
    for (double fstar : samples.values) {
        const double gamma = (fstar - mean) / sd;
        const double r = normal_hazard(gamma);
        const double arg = std::clamp(1.0 - rho2 * r * (gamma + r), 1e-12, 1.0);
        total += std::log(arg);
    }
    return -0.5 * total / static_cast<double>(samples.values.size());
}

MaxValueSamples sample_max_values(
    const MfGpModel& model, const Env& env,
    const std::function<Eigen::VectorXd(const std::vector<int>&)>& featurize,
    const AcqConfig& config, Rng& rng) {
    const int n_samples = std::max(1, config.n_max_value_samples);
    const bool enumerable = env.object_count() <= config.enumerate_cap;

    MaxValueSamples out;
    out.values.reserve(n_samples);

    const auto draw_from_pool = [&](const std::vector<std::vector<int>>& pool,
                                    int draws) {
        const int p = static_cast<int>(pool.size());
        Eigen::MatrixXd Xq(p, featurize(pool[0]).size());
        for (int i = 0; i < p; ++i) Xq.row(i) = featurize(pool[i]).transpose();
        const Eigen::VectorXd mq = Eigen::VectorXd::Ones(p);
        const Posterior post =
            model.posterior(Xq, mq, /*standardized=*/true, /*with_covariance=*/true);

        Eigen::MatrixXd cov = post.cross_covariance;
        Eigen::LLT<Eigen::MatrixXd> llt;
        double jitter = 1e-10;
        llt.compute(cov);
        while (llt.info() != Eigen::Success) {
            if (jitter > 1e-2)
                throw NumericalError("sample_max_values: pool covariance not PSD");
            cov = post.cross_covariance;
            cov.diagonal().array() += jitter;
            llt.compute(cov);
            jitter *= 10.0;
        }
        const Eigen::MatrixXd L = llt.matrixL();
        for (int s = 0; s < draws; ++s) {
            Eigen::VectorXd z(p);
            for (int i = 0; i < p; ++i) z[i] = rng.normal();
            const Eigen::VectorXd f = post.mean + L * z;
            out.values.push_back(f.maxCoeff());
        }
    };

    if (enumerable) {
        const auto pool = env.enumerate_objects(config.enumerate_cap);
        draw_from_pool(pool, n_samples);
    } else {
        const int p = std::max(2, config.candidate_pool_size);
        for (int s = 0; s < n_samples; ++s) {
            std::vector<std::vector<int>> pool(p);
            for (int i = 0; i < p; ++i) pool[i] = env.random_payload(rng);
            draw_from_pool(pool, 1);
        }
    }
    return out;
}

double mf_mes(const Eigen::VectorXd& x, int m, const MfGpModel& model,
              const MaxValueSamples& samples, const std::vector<Cost>& costs) {
    AcqCandidate cand{x, m};
    return score_batch(model, std::span<const AcqCandidate>(&cand, 1), samples,
                       costs)[0];
}

std::vector<double> score_batch(const MfGpModel& model,
                                std::span<const AcqCandidate> candidates,
                                const MaxValueSamples& samples,
                                const std::vector<Cost>& costs) {
    std::vector<double> scores(candidates.size(), 0.0);
    if (candidates.empty()) return scores;
    const int n_fid = static_cast<int>(costs.size());

    Eigen::MatrixXd Xq(candidates.size(), candidates[0].x.size());
    Eigen::VectorXd mq(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const int m = candidates[i].m;
        if (m < 1 || m > n_fid)
            throw DomainError("score_batch: fidelity out of range");
        Xq.row(i) = candidates[i].x.transpose();
        mq[i] = fidelity_to_norm(m, n_fid);
    }

    const PairStats stats = model.acquisition_stats(Xq, mq);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double ig = gibbon_information_gain(stats.mean[i], stats.sd[i],
                                                  stats.rho[i], samples);
        scores[i] = ig / costs[candidates[i].m - 1].value();
    }
    return scores;
}

}  // namespace mfgfn

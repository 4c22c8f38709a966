#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

#include "mfgfn/cost.hpp"
#include "mfgfn/env.hpp"
#include "mfgfn/rng.hpp"
#include "mfgfn/surrogate.hpp"

namespace mfgfn {

/// Monte-Carlo samples of the highest-fidelity maximum f*_M, in the
/// surrogate's standardized target units.
struct MaxValueSamples {
    std::vector<double> values;
};

struct AcqConfig {
    int n_max_value_samples = 10;
    int candidate_pool_size = 256;
    /// Pools are enumerated exactly when the object space is at most this big.
    std::uint64_t enumerate_cap = 4096;
    /// Batch correlation term log|R| of the GIBBON bound; the pointwise
    /// variant drops it (batch diversity is delegated to the sampler).
    bool gibbon_batch_term = false;
};

/// phi(g) / Phi(g) with an asymptotic expansion below g = -6 to avoid 0/0.
double normal_hazard(double gamma);

/// Pointwise GIBBON information-gain lower bound:
///   IG = -(1/(2S)) sum_f* log(1 - rho^2 r(g)(g + r(g))),  g = (f* - mean)/sd.
/// The log argument is clamped to [1e-12, 1], so IG >= 0 always.
double gibbon_information_gain(double mean, double sd, double rho,
                               const MaxValueSamples& samples);

/// Draw n pools of candidate objects (or enumerate small spaces), sample the
/// joint posterior of f at the highest fidelity over each pool, and record
/// the maxima.
MaxValueSamples sample_max_values(
    const MfGpModel& model, const Env& env,
    const std::function<Eigen::VectorXd(const std::vector<int>&)>& featurize,
    const AcqConfig& config, Rng& rng);

struct AcqCandidate {
    Eigen::VectorXd x;  // surrogate features
    int m = 1;          // 1-based fidelity index
};

/// Cost-weighted multi-fidelity MES for one candidate:
///   alpha(x, m) = IG(x, m) / lambda_m,  always >= 0.
double mf_mes(const Eigen::VectorXd& x, int m, const MfGpModel& model,
              const MaxValueSamples& samples, const std::vector<Cost>& costs);

/// Vectorised mf_mes over a candidate list, same order as the input.
std::vector<double> score_batch(const MfGpModel& model,
                                std::span<const AcqCandidate> candidates,
                                const MaxValueSamples& samples,
                                const std::vector<Cost>& costs);

}  // namespace mfgfn

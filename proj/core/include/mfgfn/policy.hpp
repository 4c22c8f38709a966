#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfgfn/env.hpp"
#include "mfgfn/rng.hpp"

namespace mfgfn {

/// Reward shaping applied to acquisition values before GFlowNet training:
///   R(alpha) = alpha^exponent * rho_anneal^(j-1) / beta,
/// floored at `floor` so log R stays finite. j is the 1-based round index.
struct RewardTransform {
    double beta = 1.0;
    double rho_anneal = 1.0;
    int round_index = 1;
    double exponent = 1.0;
    double floor = 1e-20;
};

double reward_transform(double alpha, const RewardTransform& t);

struct TrainConfig {
    int trajectories_per_round = 2000;
    int minibatch_size = 64;
    double epsilon = 0.1;  // per-step uniform mixing probability
    double lr_policy = 1e-3;
    double lr_logz = 1e-1;
    double leaky_slope = 0.01;
};

/// Two-hidden-layer MLP with a forward head over the action alphabet, a
/// backward head over parent actions sharing the trunk, and a learnable
/// log-partition scalar. Parameters live in one flat vector
/// [W1, b1, W2, b2, Wf, bf, Wb, bb, log_z]; hidden layers start with
/// fan-in-scaled uniform noise and the heads start at zero, so a fresh net
/// is uniform over legal actions.
class PolicyNet {
public:
    PolicyNet(int input_dim, int hidden, int n_actions, std::uint64_t seed,
              double leaky_slope = 0.01);

    int input_dim() const { return input_dim_; }
    int hidden() const { return hidden_; }
    int n_actions() const { return n_actions_; }
    int n_parent_actions() const { return n_actions_ - 1; }
    double leaky_slope() const { return leaky_slope_; }

    double log_z() const;
    void set_log_z(double v);

    int n_params() const { return static_cast<int>(params_.size()); }
    const Eigen::VectorXd& flat_params() const { return params_; }
    void set_flat_params(const Eigen::VectorXd& p);

    /// Masked log-probabilities over the action alphabet at one state.
    /// Illegal actions get -inf; exp of the legal entries sums to 1.
    Eigen::VectorXd forward_logprobs(const Eigen::VectorXd& features,
                                     std::span<const std::uint8_t> mask) const;

    /// Masked log-probabilities of the backward head (parent actions).
    Eigen::VectorXd backward_logprobs(const Eigen::VectorXd& features,
                                      std::span<const std::uint8_t> mask) const;

    /// Trunk + heads over a batch of feature columns.
    void forward_batch(const Eigen::MatrixXd& X, Eigen::MatrixXd& h1,
                       Eigen::MatrixXd& h2, Eigen::MatrixXd& logits_f,
                       Eigen::MatrixXd& logits_b) const;

    /// Adam step on the flat gradient; log_z uses its own learning rate.
    void apply_gradients(const Eigen::VectorXd& grad, double lr_policy,
                         double lr_logz);

    std::string to_json() const;
    static PolicyNet from_json(const std::string& text);

    // Flat-vector block offsets (column-major maps), exposed for the
    // gradient pass.
    struct Layout {
        int w1, b1, w2, b2, wf, bf, wb, bb, log_z;
    };
    Layout layout() const;

private:
    int input_dim_, hidden_, n_actions_;
    double leaky_slope_;
    Eigen::VectorXd params_;
    Eigen::VectorXd adam_m_, adam_v_;
    int adam_t_ = 0;
};

/// Sample one trajectory. With probability epsilon (per step) the action is
/// uniform over legal actions; greedy = argmax test hook. Accumulates both
/// policies' log-probabilities along the path.
Trajectory sample_trajectory(const PolicyNet& net, const Env& env, double epsilon,
                             Rng& rng, bool greedy = false);

/// Lockstep-batched sampler; one net evaluation per step for all live
/// trajectories. Equivalent in distribution to repeated sample_trajectory.
std::vector<Trajectory> sample_trajectories(const PolicyNet& net, const Env& env,
                                            int count, double epsilon, Rng& rng,
                                            bool greedy = false);

/// Trajectory-balance loss for one trajectory:
///   (log Z + sum log P_F - log R - sum log P_B)^2.
/// Throws NonPositiveRewardError when reward <= 0. When grad is non-null it
/// receives d(loss)/d(flat params).
double tb_loss(const PolicyNet& net, const Env& env, const Trajectory& trajectory,
               double reward, Eigen::VectorXd* grad = nullptr);

/// Minibatch trajectory-balance training. reward_fn maps a terminal
/// (payload, fidelity) to a strictly positive reward. Returns the per-batch
/// loss trace; throws DivergenceError when the loss becomes non-finite.
std::vector<double> train(
    PolicyNet& net, const Env& env,
    const std::function<double(const std::vector<int>&, int)>& reward_fn,
    const TrainConfig& config, Rng& rng);

/// Same loop, but rewards for a whole minibatch of terminal pairs are
/// computed in one call (lets acquisition-backed rewards batch their
/// posterior solves).
using BatchRewardFn = std::function<std::vector<double>(
    const std::vector<std::pair<std::vector<int>, int>>&)>;
std::vector<double> train_batched(PolicyNet& net, const Env& env,
                                  const BatchRewardFn& reward_fn,
                                  const TrainConfig& config, Rng& rng);

/// On-policy terminal samples (epsilon = 0), as (payload, fidelity) pairs.
std::vector<std::pair<std::vector<int>, int>> sample_terminal_pairs(
    const PolicyNet& net, const Env& env, int count, Rng& rng);

}  // namespace mfgfn

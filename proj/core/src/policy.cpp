#include "mfgfn/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "mfgfn/errors.hpp"

namespace mfgfn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Masked log-softmax over one logits column. Fills logp (same size) with
/// -inf at masked entries; returns log of the normaliser components so
/// callers can also build probabilities.
void masked_log_softmax(const Eigen::VectorXd& logits,
                        std::span<const std::uint8_t> mask, Eigen::VectorXd& logp) {
    double mx = kNegInf;
    for (int i = 0; i < logits.size(); ++i)
        if (mask[i] && logits[i] > mx) mx = logits[i];
    double sum = 0.0;
    for (int i = 0; i < logits.size(); ++i)
        if (mask[i]) sum += std::exp(logits[i] - mx);
    const double lse = mx + std::log(sum);
    logp.resize(logits.size());
    for (int i = 0; i < logits.size(); ++i)
        logp[i] = mask[i] ? logits[i] - lse : kNegInf;
}

int sample_masked(const Eigen::VectorXd& logp, std::span<const std::uint8_t> mask,
                  Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    int last_legal = -1;
    for (int i = 0; i < logp.size(); ++i) {
        if (!mask[i]) continue;
        last_legal = i;
        acc += std::exp(logp[i]);
        if (u < acc) return i;
    }
    return last_legal;
}

int uniform_masked(std::span<const std::uint8_t> mask, Rng& rng) {
    int legal = 0;
    for (auto b : mask) legal += b != 0;
    int pick = rng.uniform_int(legal);
    for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
        if (!mask[i]) continue;
        if (pick-- == 0) return i;
    }
    return -1;  // unreachable: masks always have a legal action
}

int argmax_masked(const Eigen::VectorXd& logits, std::span<const std::uint8_t> mask) {
    int best = -1;
    double bv = kNegInf;
    for (int i = 0; i < logits.size(); ++i)
        if (mask[i] && logits[i] > bv) {
            bv = logits[i];
            best = i;
        }
    return best;
}

}  // namespace

double reward_transform(double alpha, const RewardTransform& t) {
    const double shaped = std::pow(alpha, t.exponent) *
                          std::pow(t.rho_anneal, t.round_index - 1) / t.beta;
    return std::max(shaped, t.floor);
}

PolicyNet::PolicyNet(int input_dim, int hidden, int n_actions, std::uint64_t seed,
                     double leaky_slope)
    : input_dim_(input_dim),
      hidden_(hidden),
      n_actions_(n_actions),
      leaky_slope_(leaky_slope) {
    if (n_actions_ < 2) throw Error("PolicyNet: need at least two actions");
    const Layout off = layout();
    const int total = off.log_z + 1;
    params_ = Eigen::VectorXd::Zero(total);
    adam_m_ = Eigen::VectorXd::Zero(total);
    adam_v_ = Eigen::VectorXd::Zero(total);

    Rng rng(seed);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim_));
    for (int i = off.w1; i < off.b1; ++i) params_[i] = rng.uniform(-s1, s1);
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
    for (int i = off.w2; i < off.b2; ++i) params_[i] = rng.uniform(-s2, s2);
    // Output heads stay zero: a fresh net is uniform over legal actions.
}

PolicyNet::Layout PolicyNet::layout() const {
    Layout off{};
    const int ap = n_parent_actions();
    off.w1 = 0;
    off.b1 = off.w1 + hidden_ * input_dim_;
    off.w2 = off.b1 + hidden_;
    off.b2 = off.w2 + hidden_ * hidden_;
    off.wf = off.b2 + hidden_;
    off.bf = off.wf + n_actions_ * hidden_;
    off.wb = off.bf + n_actions_;
    off.bb = off.wb + ap * hidden_;
    off.log_z = off.bb + ap;
    return off;
}

double PolicyNet::log_z() const { return params_[layout().log_z]; }
void PolicyNet::set_log_z(double v) { params_[layout().log_z] = v; }

void PolicyNet::set_flat_params(const Eigen::VectorXd& p) {
    if (p.size() != params_.size()) throw Error("PolicyNet: parameter size mismatch");
    params_ = p;
}

void PolicyNet::forward_batch(const Eigen::MatrixXd& X, Eigen::MatrixXd& h1,
                              Eigen::MatrixXd& h2, Eigen::MatrixXd& logits_f,
                              Eigen::MatrixXd& logits_b) const {
    const Layout off = layout();
    const int ap = n_parent_actions();
    Eigen::Map<const Eigen::MatrixXd> W1(params_.data() + off.w1, hidden_, input_dim_);
    Eigen::Map<const Eigen::VectorXd> b1(params_.data() + off.b1, hidden_);
    Eigen::Map<const Eigen::MatrixXd> W2(params_.data() + off.w2, hidden_, hidden_);
    Eigen::Map<const Eigen::VectorXd> b2(params_.data() + off.b2, hidden_);
    Eigen::Map<const Eigen::MatrixXd> Wf(params_.data() + off.wf, n_actions_, hidden_);
    Eigen::Map<const Eigen::VectorXd> bf(params_.data() + off.bf, n_actions_);
    Eigen::Map<const Eigen::MatrixXd> Wb(params_.data() + off.wb, ap, hidden_);
    Eigen::Map<const Eigen::VectorXd> bb(params_.data() + off.bb, ap);

    const auto lrelu = [this](double v) { return v > 0.0 ? v : leaky_slope_ * v; };
    h1 = ((W1 * X).colwise() + b1).unaryExpr(lrelu);
    h2 = ((W2 * h1).colwise() + b2).unaryExpr(lrelu);
    logits_f = (Wf * h2).colwise() + bf;
    logits_b = (Wb * h2).colwise() + bb;
}

Eigen::VectorXd PolicyNet::forward_logprobs(const Eigen::VectorXd& features,
                                            std::span<const std::uint8_t> mask) const {
    Eigen::MatrixXd h1, h2, lf, lb;
    forward_batch(features, h1, h2, lf, lb);
    Eigen::VectorXd logp;
    masked_log_softmax(lf.col(0), mask, logp);
    return logp;
}

Eigen::VectorXd PolicyNet::backward_logprobs(const Eigen::VectorXd& features,
                                             std::span<const std::uint8_t> mask) const {
    Eigen::MatrixXd h1, h2, lf, lb;
    forward_batch(features, h1, h2, lf, lb);
    Eigen::VectorXd logp;
    masked_log_softmax(lb.col(0), mask, logp);
    return logp;
}

void PolicyNet::apply_gradients(const Eigen::VectorXd& grad, double lr_policy,
                                double lr_logz) {
    if (grad.size() != params_.size()) throw Error("PolicyNet: gradient size mismatch");
    ++adam_t_;
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    adam_m_ = beta1 * adam_m_ + (1.0 - beta1) * grad;
    adam_v_ = beta2 * adam_v_ + (1.0 - beta2) * grad.cwiseProduct(grad).eval();
    const double bc1 = 1.0 - std::pow(beta1, adam_t_);
    const double bc2 = 1.0 - std::pow(beta2, adam_t_);
    const int zi = layout().log_z;
    for (int i = 0; i < params_.size(); ++i) {
        const double mh = adam_m_[i] / bc1;
        const double vh = adam_v_[i] / bc2;
        const double lr = i == zi ? lr_logz : lr_policy;
        params_[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
    if (!params_.allFinite()) throw DivergenceError("PolicyNet: non-finite parameters");
}

std::string PolicyNet::to_json() const {
    nlohmann::json j;
    j["input_dim"] = input_dim_;
    j["hidden"] = hidden_;
    j["n_actions"] = n_actions_;
    j["leaky_slope"] = leaky_slope_;
    j["params"] = std::vector<double>(params_.begin(), params_.end());
    return j.dump();
}

PolicyNet PolicyNet::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PolicyNet net(j.at("input_dim").get<int>(), j.at("hidden").get<int>(),
                  j.at("n_actions").get<int>(), /*seed=*/0,
                  j.at("leaky_slope").get<double>());
    const auto p = j.at("params").get<std::vector<double>>();
    net.set_flat_params(Eigen::Map<const Eigen::VectorXd>(p.data(), p.size()));
    return net;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<Trajectory> sample_trajectories(const PolicyNet& net, const Env& env,
                                            int count, double epsilon, Rng& rng,
                                            bool greedy) {
    std::vector<Trajectory> trajs(count);
    std::vector<int> active(count);
    for (int i = 0; i < count; ++i) {
        trajs[i].states.push_back(env.reset());
        active[i] = i;
    }

    Eigen::MatrixXd X(env.encoding_size(), count);
    Eigen::MatrixXd h1, h2, lf, lb;
    Eigen::VectorXd logp;
    while (!active.empty()) {
        const int batch = static_cast<int>(active.size());
        for (int k = 0; k < batch; ++k)
            X.col(k) = env.encode(trajs[active[k]].states.back());
        const Eigen::MatrixXd Xb = X.leftCols(batch);
        net.forward_batch(Xb, h1, h2, lf, lb);

        std::vector<int> still;
        still.reserve(batch);
        for (int k = 0; k < batch; ++k) {
            Trajectory& traj = trajs[active[k]];
            const FidState& s = traj.states.back();
            const auto mask = env.allowed_actions(s);

            if (!env.is_initial(s)) {
                const auto pmask = env.parent_action_mask(s);
                Eigen::VectorXd logpb;
                masked_log_softmax(lb.col(k), pmask, logpb);
                traj.log_pb += logpb[env.action_index(traj.actions.back())];
            }

            masked_log_softmax(lf.col(k), mask, logp);
            int a;
            if (greedy) {
                a = argmax_masked(lf.col(k), mask);
            } else if (epsilon > 0.0 && rng.uniform() < epsilon) {
                a = uniform_masked(mask, rng);
            } else {
                a = sample_masked(logp, mask, rng);
            }
            traj.log_pf += logp[a];
            FidState next = env.step(s, env.action_at(a));
            traj.actions.push_back(env.action_at(a));
            const bool terminal = next.terminal;
            traj.states.push_back(std::move(next));
            if (!terminal) still.push_back(active[k]);
        }
        active = std::move(still);
    }
    return trajs;
}

Trajectory sample_trajectory(const PolicyNet& net, const Env& env, double epsilon,
                             Rng& rng, bool greedy) {
    return sample_trajectories(net, env, 1, epsilon, rng, greedy)[0];
}

std::vector<std::pair<std::vector<int>, int>> sample_terminal_pairs(
    const PolicyNet& net, const Env& env, int count, Rng& rng) {
    auto trajs = sample_trajectories(net, env, count, /*epsilon=*/0.0, rng);
    std::vector<std::pair<std::vector<int>, int>> out;
    out.reserve(trajs.size());
    for (auto& t : trajs) {
        const FidState& x = t.terminal_state();
        out.emplace_back(x.payload, x.fidelity);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trajectory-balance loss and gradients

namespace {

struct StateRow {
    int traj;
    int fwd_action;
    std::vector<std::uint8_t> fwd_mask;
    bool has_bwd;
    int bwd_action;
    std::vector<std::uint8_t> bwd_mask;
};

double tb_batch(const PolicyNet& net, const Env& env,
                std::span<const Trajectory> trajs,
                std::span<const double> log_rewards, Eigen::VectorXd* grad) {
    const int n_traj = static_cast<int>(trajs.size());
    std::vector<StateRow> rows;
    std::size_t n_states = 0;
    for (const auto& t : trajs) n_states += t.states.size() - 1;
    rows.reserve(n_states);

    Eigen::MatrixXd X(net.input_dim(), n_states);
    for (int i = 0; i < n_traj; ++i) {
        const Trajectory& t = trajs[i];
        for (std::size_t k = 0; k + 1 < t.states.size(); ++k) {
            const FidState& s = t.states[k];
            StateRow row;
            row.traj = i;
            row.fwd_action = env.action_index(t.actions[k]);
            row.fwd_mask = env.allowed_actions(s);
            row.has_bwd = k > 0;
            if (row.has_bwd) {
                row.bwd_action = env.action_index(t.actions[k - 1]);
                row.bwd_mask = env.parent_action_mask(s);
            } else {
                row.bwd_action = -1;
            }
            X.col(static_cast<int>(rows.size())) = env.encode(s);
            rows.push_back(std::move(row));
        }
    }
    const int S = static_cast<int>(rows.size());

    Eigen::MatrixXd h1, h2, lf, lb;
    net.forward_batch(X, h1, h2, lf, lb);

    Eigen::VectorXd sum_pf = Eigen::VectorXd::Zero(n_traj);
    Eigen::VectorXd sum_pb = Eigen::VectorXd::Zero(n_traj);
    std::vector<Eigen::VectorXd> pf_cols(S), pb_cols(S);
    Eigen::VectorXd logp;
    for (int s = 0; s < S; ++s) {
        const StateRow& row = rows[s];
        masked_log_softmax(lf.col(s), row.fwd_mask, logp);
        sum_pf[row.traj] += logp[row.fwd_action];
        if (grad) {
            pf_cols[s].resize(net.n_actions());
            for (int a = 0; a < net.n_actions(); ++a)
                pf_cols[s][a] = row.fwd_mask[a] ? std::exp(logp[a]) : 0.0;
        }
        if (row.has_bwd) {
            masked_log_softmax(lb.col(s), row.bwd_mask, logp);
            sum_pb[row.traj] += logp[row.bwd_action];
            if (grad) {
                pb_cols[s].resize(net.n_parent_actions());
                for (int a = 0; a < net.n_parent_actions(); ++a)
                    pb_cols[s][a] = row.bwd_mask[a] ? std::exp(logp[a]) : 0.0;
            }
        }
    }

    const double log_z = net.log_z();
    Eigen::VectorXd residual(n_traj);
    double loss = 0.0;
    for (int i = 0; i < n_traj; ++i) {
        residual[i] = log_z + sum_pf[i] - log_rewards[i] - sum_pb[i];
        loss += residual[i] * residual[i];
    }
    loss /= n_traj;
    if (!grad) return loss;

    // d loss / d logits via masked-softmax Jacobian, then trunk backprop.
    Eigen::MatrixXd dLf = Eigen::MatrixXd::Zero(net.n_actions(), S);
    Eigen::MatrixXd dLb = Eigen::MatrixXd::Zero(net.n_parent_actions(), S);
    for (int s = 0; s < S; ++s) {
        const StateRow& row = rows[s];
        const double w = 2.0 * residual[row.traj] / n_traj;
        dLf.col(s) = w * pf_cols[s];
        dLf(row.fwd_action, s) -= w;
        if (row.has_bwd) {
            dLb.col(s) = -w * pb_cols[s];
            dLb(row.bwd_action, s) += w;
        }
    }

    const auto off = net.layout();
    const int H = net.hidden();
    const int In = net.input_dim();
    const int A = net.n_actions();
    const int Ap = net.n_parent_actions();
    const Eigen::VectorXd& p = net.flat_params();
    Eigen::Map<const Eigen::MatrixXd> W2(p.data() + off.w2, H, H);
    Eigen::Map<const Eigen::MatrixXd> Wf(p.data() + off.wf, A, H);
    Eigen::Map<const Eigen::MatrixXd> Wb(p.data() + off.wb, Ap, H);

    const double slope = net.leaky_slope();
    const auto dlrelu = [slope](double h) { return h > 0.0 ? 1.0 : slope; };

    Eigen::MatrixXd dH2 = Wf.transpose() * dLf + Wb.transpose() * dLb;
    Eigen::MatrixXd dZ2 = dH2.cwiseProduct(h2.unaryExpr(dlrelu));
    Eigen::MatrixXd dH1 = W2.transpose() * dZ2;
    Eigen::MatrixXd dZ1 = dH1.cwiseProduct(h1.unaryExpr(dlrelu));

    grad->setZero(net.n_params());
    Eigen::Map<Eigen::MatrixXd>(grad->data() + off.w1, H, In).noalias() =
        dZ1 * X.transpose();
    Eigen::Map<Eigen::VectorXd>(grad->data() + off.b1, H) = dZ1.rowwise().sum();
    Eigen::Map<Eigen::MatrixXd>(grad->data() + off.w2, H, H).noalias() =
        dZ2 * h1.transpose();
    Eigen::Map<Eigen::VectorXd>(grad->data() + off.b2, H) = dZ2.rowwise().sum();
    Eigen::Map<Eigen::MatrixXd>(grad->data() + off.wf, A, H).noalias() =
        dLf * h2.transpose();
    Eigen::Map<Eigen::VectorXd>(grad->data() + off.bf, A) = dLf.rowwise().sum();
    Eigen::Map<Eigen::MatrixXd>(grad->data() + off.wb, Ap, H).noalias() =
        dLb * h2.transpose();
    Eigen::Map<Eigen::VectorXd>(grad->data() + off.bb, Ap) = dLb.rowwise().sum();
    (*grad)[off.log_z] = 2.0 * residual.sum() / n_traj;
    return loss;
}

}  // namespace

double tb_loss(const PolicyNet& net, const Env& env, const Trajectory& trajectory,
               double reward, Eigen::VectorXd* grad) {
    if (!(reward > 0.0))
        throw NonPositiveRewardError("tb_loss: reward must be strictly positive");
    const double log_r = std::log(reward);
    return tb_batch(net, env, std::span<const Trajectory>(&trajectory, 1),
                    std::span<const double>(&log_r, 1), grad);
}

std::vector<double> train_batched(PolicyNet& net, const Env& env,
                                  const BatchRewardFn& reward_fn,
                                  const TrainConfig& config, Rng& rng) {
    const int batches =
        std::max(1, config.trajectories_per_round / std::max(1, config.minibatch_size));
    std::vector<double> losses;
    losses.reserve(batches);
    Eigen::VectorXd grad(net.n_params());
    std::vector<std::pair<std::vector<int>, int>> terminals(config.minibatch_size);
    std::vector<double> log_rewards(config.minibatch_size);
    for (int b = 0; b < batches; ++b) {
        auto trajs = sample_trajectories(net, env, config.minibatch_size,
                                         config.epsilon, rng);
        for (std::size_t i = 0; i < trajs.size(); ++i) {
            const FidState& x = trajs[i].terminal_state();
            terminals[i] = {x.payload, x.fidelity};
        }
        const std::vector<double> rewards = reward_fn(terminals);
        for (std::size_t i = 0; i < trajs.size(); ++i) {
            if (!(rewards[i] > 0.0))
                throw NonPositiveRewardError("train: reward must be strictly positive");
            log_rewards[i] = std::log(rewards[i]);
        }
        const double loss = tb_batch(net, env, trajs, log_rewards, &grad);
        if (!std::isfinite(loss)) throw DivergenceError("train: non-finite loss");
        net.apply_gradients(grad, config.lr_policy, config.lr_logz);
        losses.push_back(loss);
    }
    return losses;
}

std::vector<double> train(
    PolicyNet& net, const Env& env,
    const std::function<double(const std::vector<int>&, int)>& reward_fn,
    const TrainConfig& config, Rng& rng) {
    const BatchRewardFn batched =
        [&reward_fn](const std::vector<std::pair<std::vector<int>, int>>& terminals) {
            std::vector<double> rewards(terminals.size());
            for (std::size_t i = 0; i < terminals.size(); ++i)
                rewards[i] = reward_fn(terminals[i].first, terminals[i].second);
            return rewards;
        };
    return train_batched(net, env, batched, config, rng);
}

}  // namespace mfgfn

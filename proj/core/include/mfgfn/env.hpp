#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "mfgfn/rng.hpp"

namespace mfgfn {

enum class PayloadKind { Grid, Sequence };

enum class ActionKind { Increment, Append, SetFidelity, Stop };

/// One move in the augmented state space. `arg` is the dimension for
/// Increment, the token for Append, the fidelity index (1-based) for
/// SetFidelity, and unused for Stop.
struct Action {
    ActionKind kind = ActionKind::Stop;
    int arg = 0;

    friend bool operator==(const Action&, const Action&) = default;
};

/// Partially built object plus its fidelity slot. fidelity == 0 means unset.
struct FidState {
    std::vector<int> payload;  // grid coordinates, or token list
    int fidelity = 0;
    bool terminal = false;

    friend bool operator==(const FidState&, const FidState&) = default;
};

/// A complete rollout from the origin to a terminal state, with the
/// forward/backward log-probability accumulators filled by the sampler.
struct Trajectory {
    std::vector<FidState> states;  // s0 ... terminal
    std::vector<Action> actions;   // actions[t] maps states[t] -> states[t+1]
    double log_pf = 0.0;
    double log_pb = 0.0;

    const FidState& terminal_state() const { return states.back(); }
};

struct EnvSpec {
    PayloadKind kind = PayloadKind::Grid;
    int grid_dims = 2;
    int grid_side = 100;
    int vocab_size = 4;
    int seq_length = 8;
    /// Number of oracles M. The fidelity one-hot block always spans {0..M}.
    int n_fidelities = 1;
    /// true: the sampler must pick a fidelity exactly once before Stop.
    /// false (single-fidelity mode): fidelity actions are masked and Stop
    /// finalises the state at fidelity M.
    bool fidelity_choice = true;
};

/// Immutable descriptor of a discrete compositional environment augmented
/// with a one-shot fidelity-selection action. All member functions are pure.
class Env {
public:
    explicit Env(EnvSpec spec);

    const EnvSpec& spec() const { return spec_; }

    FidState reset() const;
    bool is_initial(const FidState& s) const;

    /// Size of the flat action alphabet: base moves + M fidelity picks + Stop.
    int action_count() const { return base_actions_ + spec_.n_fidelities + 1; }
    /// Parent alphabet: every action except Stop (terminal transitions have
    /// exactly one parent, so the backward policy never scores Stop).
    int parent_action_count() const { return action_count() - 1; }

    Action action_at(int index) const;
    int action_index(const Action& a) const;

    /// Boolean mask over the action alphabet. At least one entry is true for
    /// every non-terminal state.
    std::vector<std::uint8_t> allowed_actions(const FidState& s) const;

    bool is_allowed(const FidState& s, const Action& a) const;

    /// Apply an allowed action; throws IllegalActionError otherwise.
    FidState step(const FidState& s, const Action& a) const;

    /// Exact set of (parent, action) pairs with step(parent, action) == s.
    std::vector<std::pair<FidState, Action>> parents(const FidState& s) const;

    /// Mask over the parent-action alphabet of actions that can lead into s.
    std::vector<std::uint8_t> parent_action_mask(const FidState& s) const;

    /// Fixed-length feature vector: per-dimension (or per-position) one-hots
    /// followed by a fidelity one-hot over {0..M}.
    Eigen::VectorXd encode(const FidState& s) const;
    int encoding_size() const;

    bool payload_complete(const FidState& s) const;

    /// Number of (object, fidelity) terminal pairs.
    std::uint64_t terminal_count() const;

    /// Number of complete objects, ignoring fidelity.
    std::uint64_t object_count() const;

    /// Materialise every terminal pair; throws TooLargeError above the cap.
    std::vector<std::pair<std::vector<int>, int>> enumerate_terminals(
        std::uint64_t cap = 1'000'000) const;

    /// Materialise every complete payload; throws TooLargeError above the cap.
    std::vector<std::vector<int>> enumerate_objects(std::uint64_t cap) const;

    /// Uniform draw over complete payloads.
    std::vector<int> random_payload(Rng& rng) const;

    /// Uniform draw over fidelities available to terminal states.
    int random_fidelity(Rng& rng) const;

private:
    EnvSpec spec_;
    int base_actions_ = 0;
};

}  // namespace mfgfn

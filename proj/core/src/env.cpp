#include "mfgfn/env.hpp"

#include <string>

#include "mfgfn/errors.hpp"

namespace mfgfn {

namespace {

std::string describe(const FidState& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.payload.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s.payload[i]);
    }
    out += ")|fid=" + std::to_string(s.fidelity);
    if (s.terminal) out += "|terminal";
    return out;
}

}  // namespace

Env::Env(EnvSpec spec) : spec_(spec) {
    if (spec_.n_fidelities < 1) throw ConfigError("env: n_fidelities must be >= 1");
    if (spec_.kind == PayloadKind::Grid) {
        if (spec_.grid_dims < 1 || spec_.grid_side < 1)
            throw ConfigError("env: grid dims and side must be >= 1");
        base_actions_ = spec_.grid_dims;
    } else {
        if (spec_.vocab_size < 1 || spec_.seq_length < 1)
            throw ConfigError("env: vocab size and sequence length must be >= 1");
        base_actions_ = spec_.vocab_size;
    }
}

FidState Env::reset() const {
    FidState s;
    if (spec_.kind == PayloadKind::Grid) s.payload.assign(spec_.grid_dims, 0);
    return s;
}

bool Env::is_initial(const FidState& s) const {
    return !s.terminal && s.fidelity == 0 && s == reset();
}

Action Env::action_at(int index) const {
    if (index < 0 || index >= action_count())
        throw IllegalActionError("action index " + std::to_string(index) + " out of range");
    if (index < base_actions_) {
        return spec_.kind == PayloadKind::Grid ? Action{ActionKind::Increment, index}
                                               : Action{ActionKind::Append, index};
    }
    if (index < base_actions_ + spec_.n_fidelities)
        return Action{ActionKind::SetFidelity, index - base_actions_ + 1};
    return Action{ActionKind::Stop, 0};
}

int Env::action_index(const Action& a) const {
    switch (a.kind) {
        case ActionKind::Increment:
        case ActionKind::Append:
            if (a.arg < 0 || a.arg >= base_actions_)
                throw IllegalActionError("action argument out of range");
            return a.arg;
        case ActionKind::SetFidelity:
            if (a.arg < 1 || a.arg > spec_.n_fidelities)
                throw IllegalActionError("fidelity argument out of range");
            return base_actions_ + a.arg - 1;
        case ActionKind::Stop:
            return base_actions_ + spec_.n_fidelities;
    }
    throw IllegalActionError("unknown action kind");
}

bool Env::payload_complete(const FidState& s) const {
    if (spec_.kind == PayloadKind::Grid) return true;  // every cell is a valid object
    return static_cast<int>(s.payload.size()) == spec_.seq_length;
}

std::vector<std::uint8_t> Env::allowed_actions(const FidState& s) const {
    if (s.terminal) throw IllegalActionError("allowed_actions on terminal state");
    std::vector<std::uint8_t> mask(action_count(), 0);
    if (spec_.kind == PayloadKind::Grid) {
        for (int d = 0; d < spec_.grid_dims; ++d)
            mask[d] = s.payload[d] + 1 <= spec_.grid_side - 1;
    } else {
        if (static_cast<int>(s.payload.size()) < spec_.seq_length)
            for (int t = 0; t < spec_.vocab_size; ++t) mask[t] = 1;
    }
    if (spec_.fidelity_choice && s.fidelity == 0)
        for (int m = 1; m <= spec_.n_fidelities; ++m) mask[base_actions_ + m - 1] = 1;
    const bool stop_ok =
        payload_complete(s) && (!spec_.fidelity_choice || s.fidelity >= 1);
    mask[base_actions_ + spec_.n_fidelities] = stop_ok;
    return mask;
}

bool Env::is_allowed(const FidState& s, const Action& a) const {
    if (s.terminal) return false;
    return allowed_actions(s)[action_index(a)] != 0;
}

FidState Env::step(const FidState& s, const Action& a) const {
    if (!is_allowed(s, a))
        throw IllegalActionError("illegal action at state " + describe(s));
    FidState next = s;
    switch (a.kind) {
        case ActionKind::Increment:
            next.payload[a.arg] += 1;
            break;
        case ActionKind::Append:
            next.payload.push_back(a.arg);
            break;
        case ActionKind::SetFidelity:
            next.fidelity = a.arg;
            break;
        case ActionKind::Stop:
            next.terminal = true;
            if (!spec_.fidelity_choice) next.fidelity = spec_.n_fidelities;
            break;
    }
    return next;
}

std::vector<std::pair<FidState, Action>> Env::parents(const FidState& s) const {
    if (is_initial(s)) throw Error("parents: the origin state has no parents");
    std::vector<std::pair<FidState, Action>> out;
    if (s.terminal) {
        FidState pre = s;
        pre.terminal = false;
        if (!spec_.fidelity_choice) pre.fidelity = 0;
        out.emplace_back(std::move(pre), Action{ActionKind::Stop, 0});
        return out;
    }
    if (spec_.kind == PayloadKind::Grid) {
        for (int d = 0; d < spec_.grid_dims; ++d) {
            if (s.payload[d] > 0) {
                FidState p = s;
                p.payload[d] -= 1;
                out.emplace_back(std::move(p), Action{ActionKind::Increment, d});
            }
        }
    } else if (!s.payload.empty()) {
        FidState p = s;
        const int last = p.payload.back();
        p.payload.pop_back();
        out.emplace_back(std::move(p), Action{ActionKind::Append, last});
    }
    if (spec_.fidelity_choice && s.fidelity >= 1) {
        FidState p = s;
        p.fidelity = 0;
        out.emplace_back(std::move(p), Action{ActionKind::SetFidelity, s.fidelity});
    }
    return out;
}

std::vector<std::uint8_t> Env::parent_action_mask(const FidState& s) const {
    std::vector<std::uint8_t> mask(parent_action_count(), 0);
    if (spec_.kind == PayloadKind::Grid) {
        for (int d = 0; d < spec_.grid_dims; ++d) mask[d] = s.payload[d] > 0;
    } else if (!s.payload.empty()) {
        mask[s.payload.back()] = 1;
    }
    if (spec_.fidelity_choice && s.fidelity >= 1 && !s.terminal)
        mask[base_actions_ + s.fidelity - 1] = 1;
    return mask;
}

int Env::encoding_size() const {
    const int payload_block = spec_.kind == PayloadKind::Grid
                                  ? spec_.grid_dims * spec_.grid_side
                                  : spec_.seq_length * (spec_.vocab_size + 1);
    return payload_block + spec_.n_fidelities + 1;
}

Eigen::VectorXd Env::encode(const FidState& s) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(encoding_size());
    if (spec_.kind == PayloadKind::Grid) {
        for (int d = 0; d < spec_.grid_dims; ++d)
            x[d * spec_.grid_side + s.payload[d]] = 1.0;
    } else {
        const int block = spec_.vocab_size + 1;  // tokens + pad slot
        for (int pos = 0; pos < spec_.seq_length; ++pos) {
            const int slot = pos < static_cast<int>(s.payload.size())
                                 ? s.payload[pos]
                                 : spec_.vocab_size;
            x[pos * block + slot] = 1.0;
        }
    }
    const int fid_base = encoding_size() - (spec_.n_fidelities + 1);
    x[fid_base + s.fidelity] = 1.0;
    return x;
}

std::uint64_t Env::object_count() const {
    std::uint64_t objects = 1;
    const std::uint64_t base =
        spec_.kind == PayloadKind::Grid ? spec_.grid_side : spec_.vocab_size;
    const int reps =
        spec_.kind == PayloadKind::Grid ? spec_.grid_dims : spec_.seq_length;
    for (int i = 0; i < reps; ++i) {
        if (objects > UINT64_MAX / base) throw TooLargeError("object count overflows");
        objects *= base;
    }
    return objects;
}

std::uint64_t Env::terminal_count() const {
    const std::uint64_t objects = object_count();
    const std::uint64_t fids = spec_.fidelity_choice ? spec_.n_fidelities : 1;
    if (objects > UINT64_MAX / fids) throw TooLargeError("terminal count overflows");
    return objects * fids;
}

std::vector<std::pair<std::vector<int>, int>> Env::enumerate_terminals(
    std::uint64_t cap) const {
    const std::uint64_t total = terminal_count();
    if (total > cap)
        throw TooLargeError("enumerate_terminals: " + std::to_string(total) +
                            " pairs exceeds cap " + std::to_string(cap));
    const int slots =
        spec_.kind == PayloadKind::Grid ? spec_.grid_dims : spec_.seq_length;
    const int base =
        spec_.kind == PayloadKind::Grid ? spec_.grid_side : spec_.vocab_size;

    std::vector<std::pair<std::vector<int>, int>> out;
    out.reserve(total);
    std::vector<int> payload(slots, 0);
    while (true) {
        if (spec_.fidelity_choice) {
            for (int m = 1; m <= spec_.n_fidelities; ++m) out.emplace_back(payload, m);
        } else {
            out.emplace_back(payload, spec_.n_fidelities);
        }
        int i = slots - 1;
        for (; i >= 0; --i) {
            if (++payload[i] < base) break;
            payload[i] = 0;
        }
        if (i < 0) break;
    }
    return out;
}

std::vector<std::vector<int>> Env::enumerate_objects(std::uint64_t cap) const {
    const std::uint64_t total = object_count();
    if (total > cap)
        throw TooLargeError("enumerate_objects: " + std::to_string(total) +
                            " objects exceeds cap " + std::to_string(cap));
    const int slots =
        spec_.kind == PayloadKind::Grid ? spec_.grid_dims : spec_.seq_length;
    const int base =
        spec_.kind == PayloadKind::Grid ? spec_.grid_side : spec_.vocab_size;
    std::vector<std::vector<int>> out;
    out.reserve(total);
    std::vector<int> payload(slots, 0);
    while (true) {
        out.push_back(payload);
        int i = slots - 1;
        for (; i >= 0; --i) {
            if (++payload[i] < base) break;
            payload[i] = 0;
        }
        if (i < 0) break;
    }
    return out;
}

std::vector<int> Env::random_payload(Rng& rng) const {
    const int slots =
        spec_.kind == PayloadKind::Grid ? spec_.grid_dims : spec_.seq_length;
    const int base =
        spec_.kind == PayloadKind::Grid ? spec_.grid_side : spec_.vocab_size;
    std::vector<int> payload(slots);
    for (int i = 0; i < slots; ++i) payload[i] = rng.uniform_int(base);
    return payload;
}

int Env::random_fidelity(Rng& rng) const {
    if (!spec_.fidelity_choice) return spec_.n_fidelities;
    return 1 + rng.uniform_int(spec_.n_fidelities);
}

}  // namespace mfgfn

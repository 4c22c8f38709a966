#pragma once

#include <cstdint>
#include <random>

namespace mfgfn {

/// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence
/// is fully specified by the standard) with hand-rolled uniform/normal draws
/// so results are reproducible across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n). Requires n >= 1.
    int uniform_int(int n);

    /// Standard normal via Box-Muller (cached pair).
    double normal();

    /// Derive an independent stream for a named sub-task. Mixing is
    /// splitmix64 over (seed, stream), so forks of equal arguments agree.
    Rng fork(std::uint64_t stream) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

/// splitmix64 mix step, exposed for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mfgfn

#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfgfn/cost.hpp"

namespace mfgfn {

/// One annotated oracle query: object, raw value, fidelity index, its cost.
struct Annotation {
    std::vector<int> x;
    double y = 0.0;
    int m = 1;
    Cost cost;
    int round = 0;  // 0 = initial dataset
};

/// Affine map from grid index to a continuous interval: i -> lo + i*(hi-lo)/(L-1).
struct GridMapping {
    double lo = 0.0;
    double hi = 1.0;
    int side = 2;

    double at(int i) const {
        return lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(side - 1);
    }
};

/// A family of M oracles over one object space, ordered by fidelity.
/// Costs are strictly increasing; oracle M is the target objective.
struct OracleSet {
    std::vector<std::function<double(const std::vector<int>&)>> evaluators;
    std::vector<Cost> costs;
    int score_sign = +1;  // +1 maximize raw value, -1 minimize (e.g. Branin)
    std::string name;

    int fidelity_count() const { return static_cast<int>(evaluators.size()); }

    /// Evaluate oracle m (1-based) on an object.
    double eval(int m, const std::vector<int>& x) const;

    /// Raw value mapped so that larger is always better.
    double score(int m, const std::vector<int>& x) const {
        return score_sign * eval(m, x);
    }

    void validate() const;
};

// Continuous-domain oracle primitives (fidelity m is 1-based; m = M is the
// target function).

/// Modified Branin on [-5,10] x [0,15]; three fidelities, minimised.
double branin(int m, double x1, double x2);

/// Hartmann 6-D on [0,1]^6 with per-fidelity alpha perturbation; maximised.
double hartmann6(int m, std::span<const double> x);

/// Complementarity score for fixed-length {A,C,G,T} sequences (tokens 0..3):
/// adjacent complementary ordered pairs plus twice the count of 4-mers that
/// equal their own reverse complement. The low fidelity scores only the first
/// ceil(2n/3) tokens.
double toy_sequence_energy(int m, std::span<const int> tokens);

// Grid-discretised oracle families (costs per Table-2-style defaults, override
// per experiment).

OracleSet make_branin_oracles(int grid_side,
                              std::vector<Cost> costs = {Cost::parse("0.01"),
                                                         Cost::parse("0.1"),
                                                         Cost::parse("1")});
OracleSet make_hartmann6_oracles(int grid_side,
                                 std::vector<Cost> costs = {Cost::parse("0.125"),
                                                            Cost::parse("0.25"),
                                                            Cost::parse("1")});
OracleSet make_sequence_oracles(int seq_length,
                                std::vector<Cost> costs = {Cost::parse("0.2"),
                                                           Cost::parse("20")});

GridMapping branin_mapping_x1(int side);
GridMapping branin_mapping_x2(int side);
GridMapping hartmann6_mapping(int side);

/// Evaluate a batch of (object, fidelity) queries in order. The returned cost
/// is the exact fixed-point sum of the queried oracles' costs. Domain errors
/// are rethrown with the failing query index prepended.
std::pair<std::vector<Annotation>, Cost> evaluate_batch(
    const OracleSet& set,
    std::span<const std::pair<std::vector<int>, int>> queries);

}  // namespace mfgfn

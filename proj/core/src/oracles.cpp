#include "mfgfn/oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "mfgfn/errors.hpp"

namespace mfgfn {

namespace {

constexpr double kPi = std::numbers::pi;

double branin_true(double x1, double x2) {
    const double b = 5.1 / (4.0 * kPi * kPi);
    const double lhs = x2 - b * x1 * x1 + (5.0 / kPi) * x1 - 6.0;
    return lhs * lhs + (10.0 - 5.0 / (4.0 * kPi)) * std::cos(x1) + 10.0;
}

// Medium fidelity: 10*sqrt(f(x-2)) + 2(x1-0.5) - 3(3x2-1) - 1. The radicand
// is positive everywhere by construction; clamp anyway.
double branin_mid(double x1, double x2) {
    const double f = std::max(branin_true(x1 - 2.0, x2 - 2.0), 0.0);
    return 10.0 * std::sqrt(f) + 2.0 * (x1 - 0.5) - 3.0 * (3.0 * x2 - 1.0) - 1.0;
}

// Low fidelity: f2(1.2(x+2)) - 3x2 + 1.
double branin_low(double x1, double x2) {
    return branin_mid(1.2 * (x1 + 2.0), 1.2 * (x2 + 2.0)) - 3.0 * x2 + 1.0;
}

// Standard Hartmann-6 constants. The printed table in our reference material
// garbles P (it shows the 3-D variant); these are the published 4x6 matrices.
constexpr std::array<double, 4> kHartmannAlpha = {1.0, 1.2, 3.0, 3.2};
constexpr std::array<std::array<double, 6>, 4> kHartmannA = {{
    {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
    {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
    {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
    {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
}};
constexpr std::array<std::array<double, 6>, 4> kHartmannP = {{
    {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
    {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
    {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
    {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
}};
constexpr std::array<double, 4> kHartmannDelta = {0.01, -0.01, -0.1, 0.1};
constexpr int kHartmannM = 3;

int sequence_prefix_length(int n) { return (2 * n + 2) / 3; }  // ceil(2n/3)

bool complementary(int a, int b) {
    // A=0, C=1, G=2, T=3: A<->T, C<->G
    return (a == 0 && b == 3) || (a == 3 && b == 0) || (a == 1 && b == 2) ||
           (a == 2 && b == 1);
}

int complement_token(int a) { return 3 - a; }

double sequence_score(std::span<const int> tokens) {
    const int n = static_cast<int>(tokens.size());
    int pairs = 0;
    for (int i = 0; i + 1 < n; ++i)
        if (complementary(tokens[i], tokens[i + 1])) ++pairs;
    int palindromes = 0;
    for (int i = 0; i + 4 <= n; ++i) {
        bool pal = true;
        for (int j = 0; j < 4; ++j) {
            if (tokens[i + j] != complement_token(tokens[i + 3 - j])) {
                pal = false;
                break;
            }
        }
        if (pal) ++palindromes;
    }
    return static_cast<double>(pairs + 2 * palindromes);
}

}  // namespace

double branin(int m, double x1, double x2) {
    if (m < 1 || m > 3) throw DomainError("branin: fidelity must be in {1,2,3}");
    if (x1 < -5.0 || x1 > 10.0 || x2 < 0.0 || x2 > 15.0)
        throw DomainError("branin: point outside [-5,10] x [0,15]");
    switch (m) {
        case 1: return branin_low(x1, x2);
        case 2: return branin_mid(x1, x2);
        default: return branin_true(x1, x2);
    }
}

double hartmann6(int m, std::span<const double> x) {
    if (m < 1 || m > kHartmannM)
        throw DomainError("hartmann6: fidelity must be in {1,2,3}");
    if (x.size() != 6) throw DomainError("hartmann6: expected six coordinates");
    for (double xi : x)
        if (xi < 0.0 || xi > 1.0) throw DomainError("hartmann6: point outside [0,1]^6");
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double alpha_m =
            kHartmannAlpha[i] + static_cast<double>(kHartmannM - m) * kHartmannDelta[i];
        double expo = 0.0;
        for (int j = 0; j < 6; ++j) {
            const double d = x[j] - kHartmannP[i][j];
            expo += kHartmannA[i][j] * d * d;
        }
        sum += alpha_m * std::exp(-expo);
    }
    return sum;
}

double toy_sequence_energy(int m, std::span<const int> tokens) {
    if (m < 1 || m > 2)
        throw DomainError("toy_sequence_energy: fidelity must be in {1,2}");
    for (int t : tokens)
        if (t < 0 || t > 3)
            throw InvalidTokenError("toy_sequence_energy: token " + std::to_string(t) +
                                    " outside {A,C,G,T}");
    if (m == 2) return sequence_score(tokens);
    const int prefix = sequence_prefix_length(static_cast<int>(tokens.size()));
    return sequence_score(tokens.subspan(0, prefix));
}

GridMapping branin_mapping_x1(int side) { return GridMapping{-5.0, 10.0, side}; }
GridMapping branin_mapping_x2(int side) { return GridMapping{0.0, 15.0, side}; }
GridMapping hartmann6_mapping(int side) { return GridMapping{0.0, 1.0, side}; }

double OracleSet::eval(int m, const std::vector<int>& x) const {
    if (m < 1 || m > fidelity_count())
        throw DomainError("oracle fidelity " + std::to_string(m) + " out of range");
    return evaluators[m - 1](x);
}

void OracleSet::validate() const {
    if (evaluators.empty() || evaluators.size() != costs.size())
        throw ConfigError("oracle set: evaluators and costs must align and be non-empty");
    // Costs increase with fidelity. Equal neighbours are tolerated (the
    // ablation harness accepts a degenerate equal-cost pair with a warning);
    // decreasing costs are always an error.
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (costs[i].micros() <= 0) throw ConfigError("oracle costs must be positive");
        if (i > 0 && costs[i] < costs[i - 1])
            throw ConfigError("oracle costs must be non-decreasing in fidelity");
    }
}

OracleSet make_branin_oracles(int grid_side, std::vector<Cost> costs) {
    const GridMapping m1 = branin_mapping_x1(grid_side);
    const GridMapping m2 = branin_mapping_x2(grid_side);
    OracleSet set;
    set.name = "branin";
    set.score_sign = -1;
    set.costs = std::move(costs);
    for (int m = 1; m <= 3; ++m) {
        set.evaluators.push_back([m, m1, m2](const std::vector<int>& idx) {
            if (idx.size() != 2) throw DomainError("branin: expected a 2-D grid index");
            return branin(m, m1.at(idx[0]), m2.at(idx[1]));
        });
    }
    set.validate();
    return set;
}

OracleSet make_hartmann6_oracles(int grid_side, std::vector<Cost> costs) {
    const GridMapping map = hartmann6_mapping(grid_side);
    OracleSet set;
    set.name = "hartmann6";
    set.score_sign = +1;
    set.costs = std::move(costs);
    for (int m = 1; m <= 3; ++m) {
        set.evaluators.push_back([m, map](const std::vector<int>& idx) {
            if (idx.size() != 6) throw DomainError("hartmann6: expected a 6-D grid index");
            std::array<double, 6> x{};
            for (int j = 0; j < 6; ++j) x[j] = map.at(idx[j]);
            return hartmann6(m, x);
        });
    }
    set.validate();
    return set;
}

OracleSet make_sequence_oracles(int /*seq_length*/, std::vector<Cost> costs) {
    OracleSet set;
    set.name = "sequence_toy";
    set.score_sign = +1;
    set.costs = std::move(costs);
    for (int m = 1; m <= 2; ++m) {
        set.evaluators.push_back([m](const std::vector<int>& tokens) {
            return toy_sequence_energy(m, tokens);
        });
    }
    set.validate();
    return set;
}

std::pair<std::vector<Annotation>, Cost> evaluate_batch(
    const OracleSet& set,
    std::span<const std::pair<std::vector<int>, int>> queries) {
    std::vector<Annotation> annotations;
    annotations.reserve(queries.size());
    Cost total;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto& [x, m] = queries[i];
        if (m < 1 || m > set.fidelity_count())
            throw DomainError("query " + std::to_string(i) + ": fidelity " +
                              std::to_string(m) + " out of range");
        Annotation a;
        a.x = x;
        a.m = m;
        a.cost = set.costs[m - 1];
        try {
            a.y = set.eval(m, x);
        } catch (const Error& e) {
            throw DomainError("query " + std::to_string(i) + ": " + e.what());
        }
        total += a.cost;
        annotations.push_back(std::move(a));
    }
    return {std::move(annotations), total};
}

}  // namespace mfgfn

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfgfn/cost.hpp"
#include "mfgfn/errors.hpp"
#include "mfgfn/oracles.hpp"
#include "mfgfn/rng.hpp"

using namespace mfgfn;

namespace {

nlohmann::json load_fixtures() {
    std::ifstream in(std::string(MFGFN_FIXTURE_DIR) + "/oracle_fixtures.json");
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

// Independent scalar re-implementation of the true Branin expression, written
// directly from the closed form (kept separate from the library path).
double branin_closed_form(double x1, double x2) {
    const double pi = std::numbers::pi;
    const double t = x2 - 5.1 / (4.0 * pi * pi) * x1 * x1 + 5.0 / pi * x1 - 6.0;
    return t * t + (10.0 - 5.0 / (4.0 * pi)) * std::cos(x1) + 10.0;
}

// Independent sequence scorer: complementary adjacencies + 2x reverse-
// complement palindromic 4-mers, written as a brute-force loop.
int seq_score_reference(const std::vector<int>& s) {
    const auto comp = [](int t) { return 3 - t; };
    int pairs = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i + 1] == comp(s[i])) ++pairs;
    int pal = 0;
    for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
        std::vector<int> w(s.begin() + i, s.begin() + i + 4);
        std::vector<int> rc(4);
        for (int j = 0; j < 4; ++j) rc[j] = comp(w[3 - j]);
        if (w == rc) ++pal;
    }
    return pairs + 2 * pal;
}

std::vector<int> all_sequences_next(std::vector<int>& s) {
    for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
        if (++s[i] < 4) return s;
        s[i] = 0;
    }
    return {};
}

}  // namespace

TEST_CASE("branin closed form and domain") {
    const auto fix = load_fixtures();
    CHECK(branin(3, -5.0, 0.0) ==
          doctest::Approx(branin_closed_form(-5.0, 0.0)).epsilon(1e-12));
    CHECK(branin(3, -5.0, 0.0) ==
          doctest::Approx(fix["branin_at_m3_minus5_0"].get<double>()).epsilon(1e-12));
    CHECK(branin(1, -5.0, 0.0) ==
          doctest::Approx(fix["branin_at_m1_minus5_0"].get<double>()).epsilon(1e-12));
    CHECK(branin(2, -5.0, 0.0) ==
          doctest::Approx(fix["branin_at_m2_minus5_0"].get<double>()).epsilon(1e-12));

    CHECK_THROWS_AS(branin(3, -5.1, 0.0), DomainError);
    CHECK_THROWS_AS(branin(3, 0.0, 15.5), DomainError);
    CHECK_THROWS_AS(branin(4, 0.0, 0.0), DomainError);
}

TEST_CASE("branin grid scan: argmin and explained variance fixtures") {
    const auto fix = load_fixtures();
    const int L = 100;
    const OracleSet set = make_branin_oracles(L);

    double best = 1e30, worst = -1e30;
    std::array<int, 2> best_idx{0, 0};
    std::vector<double> v1, v2, v3;
    v1.reserve(L * L);
    v2.reserve(L * L);
    v3.reserve(L * L);
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            const std::vector<int> idx{i, j};
            const double f3 = set.eval(3, idx);
            v1.push_back(set.eval(1, idx));
            v2.push_back(set.eval(2, idx));
            v3.push_back(f3);
            if (f3 < best) {
                best = f3;
                best_idx = {i, j};
            }
            worst = std::max(worst, f3);
        }
    }
    CHECK(best == doctest::Approx(fix["branin_grid_min"].get<double>()).epsilon(1e-12));
    CHECK(worst == doctest::Approx(fix["branin_grid_max"].get<double>()).epsilon(1e-12));
    CHECK(best_idx[0] == fix["branin_grid_argmin"][0].get<int>());
    CHECK(best_idx[1] == fix["branin_grid_argmin"][1].get<int>());

    // Explained variance of the implemented fidelity formulas. The numbers
    // printed in our reference material do not follow from its own formulas;
    // the fixture freezes the brute-force values of the implemented family.
    const auto ev = [&](const std::vector<double>& fm) {
        double mean_r = 0.0, mean_t = 0.0;
        for (std::size_t k = 0; k < v3.size(); ++k) {
            mean_r += v3[k] - fm[k];
            mean_t += v3[k];
        }
        mean_r /= v3.size();
        mean_t /= v3.size();
        double var_r = 0.0, var_t = 0.0;
        for (std::size_t k = 0; k < v3.size(); ++k) {
            var_r += (v3[k] - fm[k] - mean_r) * (v3[k] - fm[k] - mean_r);
            var_t += (v3[k] - mean_t) * (v3[k] - mean_t);
        }
        return 1.0 - var_r / var_t;
    };
    CHECK(ev(v1) == doctest::Approx(fix["branin_ev"][0].get<double>()).epsilon(1e-9));
    CHECK(ev(v2) == doctest::Approx(fix["branin_ev"][1].get<double>()).epsilon(1e-9));
    CHECK(ev(v3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hartmann: m=3 is the unmodified function") {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        std::array<double, 6> x{};
        for (auto& xi : x) xi = rng.uniform();
        // alpha(3) = alpha since (M - m) = 0: perturbation-free evaluation.
        const double direct = hartmann6(3, x);
        // difference m=1 vs m=3 equals sum_i 2*delta_i exp(-...)
        const std::array<double, 4> delta{0.01, -0.01, -0.1, 0.1};
        const std::array<double, 4> alpha{1.0, 1.2, 3.0, 3.2};
        // reconstruct the exponential basis from two fidelity evaluations
        const double d13 = hartmann6(1, x) - direct;
        const double d23 = hartmann6(2, x) - direct;
        CHECK(d13 == doctest::Approx(2.0 * d23).epsilon(1e-9));
        (void)delta;
        (void)alpha;
        CHECK(std::isfinite(direct));
    }
    CHECK_THROWS_AS(hartmann6(3, std::array<double, 6>{0, 0, 0, 0, 0, 1.2}),
                    DomainError);
}

TEST_CASE("hartmann grid scan: maximum fixture") {
    const auto fix = load_fixtures();
    const int L = 10;
    const OracleSet set = make_hartmann6_oracles(L);
    double best = -1e30;
    std::vector<int> best_idx;
    std::vector<int> idx(6, 0);
    while (true) {
        const double v = set.eval(3, idx);
        if (v > best) {
            best = v;
            best_idx = idx;
        }
        int d = 5;
        for (; d >= 0; --d) {
            if (++idx[d] < L) break;
            idx[d] = 0;
        }
        if (d < 0) break;
    }
    CHECK(best == doctest::Approx(fix["hartmann_grid_max"].get<double>()).epsilon(1e-12));
    const auto want = fix["hartmann_grid_argmax"].get<std::vector<int>>();
    CHECK(best_idx == want);
}

TEST_CASE("hartmann fidelity difference identity") {
    // f(m=1) - f(m=3) = sum_i 2 delta_i exp(-sum_j A_ij (x_j - P_ij)^2),
    // checked numerically against a direct evaluation of the basis.
    Rng rng(5);
    const std::array<std::array<double, 6>, 4> A = {{
        {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
        {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
        {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
        {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
    }};
    const std::array<std::array<double, 6>, 4> P = {{
        {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
        {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
        {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
        {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
    }};
    const std::array<double, 4> delta{0.01, -0.01, -0.1, 0.1};
    for (int t = 0; t < 30; ++t) {
        std::array<double, 6> x{};
        for (auto& xi : x) xi = rng.uniform();
        double expect = 0.0;
        for (int i = 0; i < 4; ++i) {
            double e = 0.0;
            for (int j = 0; j < 6; ++j)
                e += A[i][j] * (x[j] - P[i][j]) * (x[j] - P[i][j]);
            expect += 2.0 * delta[i] * std::exp(-e);
        }
        CHECK(hartmann6(1, x) - hartmann6(3, x) ==
              doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("toy sequence oracle: fixtures and exhaustive correlation") {
    const auto fix = load_fixtures();

    const std::vector<int> atat{0, 3, 0, 3, 0, 3, 0, 3};
    CHECK(toy_sequence_energy(2, atat) == fix["seq_atat8_m2"].get<double>());
    CHECK(toy_sequence_energy(1, atat) == fix["seq_atat8_m1"].get<double>());
    CHECK(toy_sequence_energy(2, atat) == seq_score_reference(atat));

    const std::vector<int> aaaa(8, 0);
    CHECK(toy_sequence_energy(2, aaaa) == 0.0);
    CHECK(toy_sequence_energy(2, std::vector<int>(12, 0)) == 0.0);

    CHECK_THROWS_AS(toy_sequence_energy(2, std::vector<int>{0, 9}),
                    InvalidTokenError);

    // Exhaustive scan of all 4^8 sequences: implementation matches the
    // reference scorer, and the low/high fidelity correlation is the fixture.
    std::vector<int> s(8, 0);
    double sum1 = 0, sum2 = 0, sum11 = 0, sum22 = 0, sum12 = 0;
    double max2 = -1, min2 = 1e9;
    long n = 0;
    int n_at_max = 0;
    const double fix_max = fix["seq_max_score"].get<double>();
    while (true) {
        const double hi = toy_sequence_energy(2, s);
        const double lo = toy_sequence_energy(1, s);
        CHECK(hi == seq_score_reference(s));
        sum1 += lo;
        sum2 += hi;
        sum11 += lo * lo;
        sum22 += hi * hi;
        sum12 += lo * hi;
        max2 = std::max(max2, hi);
        min2 = std::min(min2, hi);
        if (hi == fix_max) ++n_at_max;
        ++n;
        if (all_sequences_next(s).empty()) break;
    }
    CHECK(n == 65536);
    CHECK(max2 == fix_max);
    CHECK(min2 == fix["seq_min_score"].get<double>());
    CHECK(n_at_max == fix["seq_n_at_max"].get<int>());
    const double cov = sum12 / n - (sum1 / n) * (sum2 / n);
    const double v1 = sum11 / n - (sum1 / n) * (sum1 / n);
    const double v2 = sum22 / n - (sum2 / n) * (sum2 / n);
    const double corr = cov / std::sqrt(v1 * v2);
    CHECK(corr > 0.0);
    CHECK(corr == doctest::Approx(fix["seq_corr_m1_m2"].get<double>()).epsilon(1e-9));
}

TEST_CASE("evaluate_batch: exact cost accounting") {
    const OracleSet set = make_branin_oracles(100);
    const std::vector<int> x{10, 20};
    std::vector<std::pair<std::vector<int>, int>> queries{{x, 1}, {x, 1}, {x, 3}};
    auto [annotations, total] = evaluate_batch(set, queries);
    REQUIRE(annotations.size() == 3);
    CHECK(total == Cost::parse("1.02"));
    CHECK(annotations[0].cost == Cost::parse("0.01"));
    CHECK(annotations[2].m == 3);

    auto [empty_ann, zero] =
        evaluate_batch(set, std::vector<std::pair<std::vector<int>, int>>{});
    CHECK(empty_ann.empty());
    CHECK(zero == Cost{});

    const OracleSet dna = make_sequence_oracles(8);
    std::vector<std::pair<std::vector<int>, int>> dq;
    const std::vector<int> seq{0, 1, 2, 3, 0, 1, 2, 3};
    for (int i = 0; i < 5; ++i) dq.emplace_back(seq, 1);
    dq.emplace_back(seq, 2);
    auto [dann, dtotal] = evaluate_batch(dna, dq);
    CHECK(dtotal == Cost::parse("21"));

    // failing index is annotated
    std::vector<std::pair<std::vector<int>, int>> bad{{x, 1}, {{-3, 2}, 2}};
    try {
        evaluate_batch(set, bad);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("query 1") != std::string::npos);
    }
}

TEST_CASE("cost arithmetic is exact over many accumulations") {
    // 0.01 + 0.1 summed thousands of times stays exact in fixed point.
    Cost total;
    for (int i = 0; i < 10000; ++i) {
        total += Cost::parse("0.01");
        total += Cost::parse("0.1");
    }
    CHECK(total == Cost::parse("1100"));
    CHECK(total.micros() == 1'100'000'000);
    CHECK(Cost::parse("0.125").value() == doctest::Approx(0.125));
    CHECK(Cost::parse("20").str() == "20");
    CHECK(Cost::parse("4.2").str() == "4.2");
    CHECK((Cost::parse("0.2") * 5 + Cost::parse("20")).str() == "21");
    CHECK_THROWS_AS(Cost::parse("0.1234567"), ConfigError);
    CHECK_THROWS_AS(Cost::parse("abc"), ConfigError);
}

TEST_CASE("oracle sets validate cost ordering") {
    CHECK_THROWS_AS(
        make_branin_oracles(100, {Cost::parse("1"), Cost::parse("0.5"),
                                  Cost::parse("2")}),
        ConfigError);
    CHECK_THROWS_AS(
        make_sequence_oracles(8, {Cost::parse("0"), Cost::parse("1")}), ConfigError);
}

TEST_CASE("grid mapping is the affine cell-center rule") {
    const GridMapping map = branin_mapping_x1(100);
    CHECK(map.at(0) == doctest::Approx(-5.0));
    CHECK(map.at(99) == doctest::Approx(10.0));
    CHECK(map.at(33) == doctest::Approx(-5.0 + 33.0 * 15.0 / 99.0));
    const GridMapping h = hartmann6_mapping(10);
    CHECK(h.at(0) == 0.0);
    CHECK(h.at(9) == doctest::Approx(1.0));
}

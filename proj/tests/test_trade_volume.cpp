#include "doctest.h"

#include "ebl/equilibrium.hpp"
#include "ebl/error.hpp"
#include "ebl/trade_volume.hpp"

#include <cmath>
#include <random>

using namespace ebl;

namespace {

EconomyParams make(int q, double lambda, double R = 1.1, double gamma = 1.0, double sigma = 1.0) {
    EconomyParams p;
    p.q = q;
    p.R = R;
    p.gamma = gamma;
    p.sigma = sigma;
    p.lambda = lambda;
    return p;
}

const DividendHistory kPath(0, {1.0, 0.4, 2.3, 1.7, -0.6, 3.1, 2.2, 0.9});

constexpr TurnoverConvention kAll[] = {TurnoverConvention::kEntryExit,
                                       TurnoverConvention::kReplacement,
                                       TurnoverConvention::kInterior};

} // namespace

TEST_CASE("definitional TV matches the 50-digit oracle") {
    // Frozen from tests/oracle/trade_volume_oracle.py.
    const auto p = make(3, 1.0);
    const auto c = solve_myopic_prices(p);
    CHECK(trade_volume_definition(p, c, kPath, 7, TurnoverConvention::kEntryExit).tv ==
          doctest::Approx(0.78663660242560664).epsilon(1e-12));
    CHECK(trade_volume_definition(p, c, kPath, 7, TurnoverConvention::kReplacement).tv ==
          doctest::Approx(0.016999688988227016).epsilon(1e-12));
    CHECK(trade_volume_definition(p, c, kPath, 7, TurnoverConvention::kInterior).tv ==
          doctest::Approx(0.010159257314257891).epsilon(1e-12));

    const auto p4 = make(4, 2.0, 1.05, 2.0, 0.5);
    CHECK(trade_volume_definition(p4, solve_myopic_prices(p4), kPath, 7).tv ==
          doctest::Approx(0.68517733986274494).epsilon(1e-12));
}

TEST_CASE("per-cohort changes reproduce tv") {
    const auto p = make(3, 1.0);
    const auto c = solve_myopic_prices(p);
    for (auto conv : kAll) {
        const auto pt = trade_volume_definition(p, c, kPath, 6, conv);
        double ss = 0.0;
        for (const auto& [n, dx] : pt.per_cohort_changes) ss += dx * dx;
        CHECK(std::abs(pt.tv * pt.tv - ss / 3) < 1e-10);
        CHECK(pt.time == 6);
    }
    CHECK(trade_volume_definition(p, c, kPath, 6, TurnoverConvention::kEntryExit).per_cohort_changes.size() == 4);
    CHECK(trade_volume_definition(p, c, kPath, 6, TurnoverConvention::kReplacement).per_cohort_changes.size() == 3);
    CHECK(trade_volume_definition(p, c, kPath, 6, TurnoverConvention::kInterior).per_cohort_changes.size() == 2);
}

TEST_CASE("steady state") {
    for (int q : {1, 2, 5}) {
        const auto p = make(q, 1.5);
        const auto c = solve_myopic_prices(p);
        const DividendHistory flat(0, std::vector<double>(3 * q + 2, 2.0));
        const long t = 3 * q + 1;
        CHECK(trade_volume_definition(p, c, flat, t, TurnoverConvention::kInterior).tv < 1e-12);
        CHECK(trade_volume_definition(p, c, flat, t, TurnoverConvention::kReplacement).tv < 1e-12);
        // Entry at 0 -> 1 and exit at 1 -> 0.
        CHECK(trade_volume_definition(p, c, flat, t, TurnoverConvention::kEntryExit).tv ==
              doctest::Approx(std::sqrt(2.0 / q)).epsilon(1e-10));
    }
}

TEST_CASE("belief form equals the definition on random paths") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd(0.5, 1.5);
    for (int q : {1, 2, 3, 4, 7}) {
        for (double lam : {-1.0, 0.0, 0.5, 3.0}) {
            for (double R : {1.02, 1.5}) {
                const auto p = make(q, lam, R, 0.7, 1.3);
                const auto c = solve_myopic_prices(p);
                for (int rep = 0; rep < 25; ++rep) {
                    std::vector<double> v(static_cast<std::size_t>(q + 3));
                    for (double& x : v) x = nd(rng);
                    const DividendHistory h(-2, v);
                    const long t = h.last_time();
                    for (auto conv : kAll) {
                        const double def = trade_volume_definition(p, c, h, t, conv).tv;
                        const double bel = trade_volume_beliefs(p, c, h, t, conv);
                        CHECK(std::abs(def - bel) < 1e-10 * std::max(1.0, def));
                    }
                }
            }
        }
    }
}

TEST_CASE("literal zero boundary beliefs do not reproduce the definition") {
    // On a flat path the definition gives sqrt(2/q) while the literal form
    // scales with the dividend level.
    const auto p = make(2, 1.0);
    const auto c = solve_myopic_prices(p);
    const DividendHistory flat(0, std::vector<double>(6, 40.0));
    const double def = trade_volume_definition(p, c, flat, 5).tv;
    const double lit = trade_volume_beliefs(p, c, flat, 5, TurnoverConvention::kEntryExit,
                                            BoundaryBelief::kLiteralZero);
    CHECK(def == doctest::Approx(1.0));
    CHECK(std::abs(lit - def) > 1.0);
}

TEST_CASE("equal belief changes give zero interior volume") {
    // lambda -> infinity: every cohort's belief jumps to d_t.
    const auto p = make(4, 200.0);
    const auto c = solve_myopic_prices(p);
    CHECK(trade_volume_beliefs(p, c, kPath, 7, TurnoverConvention::kReplacement) < 1e-12);
}

TEST_CASE("shift invariance") {
    const auto p = make(3, 0.8);
    const auto c = solve_myopic_prices(p);
    std::vector<double> v(kPath.values().begin(), kPath.values().end());
    for (double& x : v) x += 17.0;
    const DividendHistory shifted(0, v);
    for (auto conv : kAll)
        CHECK(trade_volume_definition(p, c, shifted, 7, conv).tv ==
              doctest::Approx(trade_volume_definition(p, c, kPath, 7, conv).tv).epsilon(1e-9));
}

TEST_CASE("two-cohort closed form") {
    for (double lam : {0.0, 1.0, 3.0, 5.0}) {
        const auto p = make(2, lam);
        const auto c = solve_myopic_prices(p);
        // Matches the definition when d_{t-1} = d_{t-2}.
        const DividendHistory h(0, {0.3, 1.2, 1.2, 2.9});
        const double def = trade_volume_definition(p, c, h, 3, TurnoverConvention::kReplacement).tv;
        CHECK(std::abs(toy_trade_volume_q2(p, c, 1.2, 2.9) - def) < 1e-12);
        CHECK(toy_trade_volume_q2(p, c, 1.2, 2.9) == doctest::Approx(thought_experiment_tv(p, c, 1.2, 2.9)));
        CHECK(toy_trade_volume_q2(p, c, 0.0, 2.0) > toy_trade_volume_q2(p, c, 0.0, 1.0));
    }
    double prev = INFINITY;
    for (double lam : {0.0, 1.0, 3.0, 5.0}) {
        const auto p = make(2, lam);
        const double tv = toy_trade_volume_q2(p, solve_myopic_prices(p), 1.0, 2.0);
        CHECK(tv < prev);
        prev = tv;
    }
    CHECK_THROWS_AS(toy_trade_volume_q2(make(3, 1.0), solve_myopic_prices(make(3, 1.0)), 0, 1),
                    ValidationError);
}

TEST_CASE("thought experiment against the explicit path") {
    for (int q : {2, 3, 6}) {
        for (double lam : {0.0, 1.0, 3.0}) {
            const auto p = make(q, lam);
            const auto c = solve_myopic_prices(p);
            std::vector<double> v(static_cast<std::size_t>(2 * q + 2), 1.5);
            v.back() = -0.25;
            const DividendHistory h(0, v);
            const long t = h.last_time();
            const double oracle = trade_volume_definition(p, c, h, t, TurnoverConvention::kReplacement).tv;
            CHECK(thought_experiment_tv(p, c, 1.5, -0.25) == doctest::Approx(oracle).epsilon(1e-10));
            CHECK(trade_volume_definition(p, c, h, t - 1, TurnoverConvention::kReplacement).tv < 1e-12);
        }
    }
    const auto p = make(4, 1.0);
    const auto c = solve_myopic_prices(p);
    CHECK(thought_experiment_tv(p, c, 2.0, 2.0) == 0.0);
    const auto p60 = make(4, 60.0);
    CHECK(thought_experiment_tv(p60, solve_myopic_prices(p60), 0.0, 1.0) < 1e-6);
}

TEST_CASE("errors and parsing") {
    const auto p = make(3, 1.0);
    const auto c = solve_myopic_prices(p);
    CHECK_THROWS_AS(trade_volume_definition(p, c, kPath, 2), ValidationError);
    CHECK_THROWS_AS(trade_volume_beliefs(p, c, kPath, 8), ValidationError);
    CHECK(trade_volume_series(p, c, kPath, 3, 7, TurnoverConvention::kInterior).size() == 5);
    for (auto conv : kAll) CHECK(parse_turnover_convention(to_string(conv)) == conv);
    CHECK_THROWS_AS(parse_turnover_convention("bogus"), ValidationError);
}

#include "doctest.h"

#include "ebl/error.hpp"
#include "ebl/measures.hpp"

#include <cmath>
#include <random>

using namespace ebl;

namespace {

YearSeries constant_returns(long first, long last, double r) {
    return {first, std::vector<double>(static_cast<std::size_t>(last - first + 1), r)};
}

PopulationPanel uniform_population(const ExperiencePanel& panel, double count = 1.0) {
    PopulationPanel pop;
    for (const auto& [key, v] : panel) pop[key] = count;
    return pop;
}

} // namespace

TEST_CASE("experienced returns: hand values") {
    const auto flat = experienced_returns(constant_returns(1900, 2000, 0.07), 1.5, 1920, 1990);
    for (const auto& [key, v] : flat) CHECK(v == doctest::Approx(0.07).epsilon(1e-14));

    const YearSeries r{2000, {0.10, -0.05, 0.20}};
    const auto p = experienced_returns(r, 1.0, 2000, 2002);
    CHECK(p.at({2001, 2000}) == doctest::Approx(2.0 / 3.0 * -0.05 + 1.0 / 3.0 * 0.10).epsilon(1e-15));
    CHECK(p.at({2002, 2002}) == 0.20);
    CHECK(p.at({2000, 2000}) == 0.10);
    CHECK(p.count({2000, 2001}) == 0);
}

TEST_CASE("experienced returns with no recency bias are lifetime means") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.06, 0.18);
    YearSeries r{1900, {}};
    for (int i = 0; i < 121; ++i) r.values.push_back(n(rng));
    const auto p = experienced_returns(r, 0.0, 1900, 2020);
    for (const auto& [key, v] : p) {
        double s = 0.0;
        for (long y = key.second; y <= key.first; ++y) s += r.at(y);
        CHECK(std::abs(v - s / static_cast<double>(key.first - key.second + 1)) < 1e-15);
    }
}

TEST_CASE("experienced returns coverage") {
    const YearSeries r = constant_returns(1950, 2000, 0.05);
    const auto p = experienced_returns(r, 1.0, 1900, 1960, 10);
    CHECK(p.begin()->first.second == 1950); // earlier cohorts dropped
    for (const auto& [key, v] : p) CHECK(key.first - key.second <= 10);
    CHECK_THROWS_AS(experienced_returns(r, 1.0, 1800, 1900), ValidationError);
    CHECK_THROWS_AS(experienced_returns(r, 1.0, 1990, 1980), ValidationError);
}

TEST_CASE("group gap") {
    ExperiencePanel panel{{{2000, 1930}, 0.10}, {{2000, 1975}, 0.04}};
    PopulationPanel pop{{{2000, 1930}, 1.0}, {{2000, 1975}, 3.0}};
    CHECK(group_gap(panel, pop, 2000) == doctest::Approx(0.06).epsilon(1e-14));
    for (auto& [k, v] : pop) v *= 2.0;
    CHECK(group_gap(panel, pop, 2000) == doctest::Approx(0.06).epsilon(1e-14));
    panel[{2000, 1930}] = 0.04;
    CHECK(group_gap(panel, pop, 2000) == 0.0);
    CHECK_THROWS_AS(group_gap(panel, pop, 2001), ValidationError);
    pop.erase({2000, 1930});
    CHECK_THROWS_AS(group_gap(panel, pop, 2000), ValidationError);
}

TEST_CASE("disagreement") {
    ExperiencePanel panel{{{2000, 1950}, 0.0}, {{2000, 1980}, 0.1}};
    PopulationPanel pop{{{2000, 1950}, 5.0}, {{2000, 1980}, 5.0}};
    CHECK(disagreement_std(panel, pop, 2000) == doctest::Approx(0.05).epsilon(1e-14));
    for (auto& [k, v] : pop) v *= 7.0;
    CHECK(disagreement_std(panel, pop, 2000) == doctest::Approx(0.05).epsilon(1e-14));
    panel[{2000, 1980}] = 0.0;
    CHECK(disagreement_std(panel, pop, 2000) == 0.0);
    pop[{2000, 1980}] = 0.0;
    CHECK_THROWS_AS(disagreement_std(panel, pop, 2000), ValidationError);
    pop[{2000, 1980}] = -1.0;
    CHECK_THROWS_AS(disagreement_std(panel, pop, 2000), ValidationError);
}

TEST_CASE("boom then bust flips the sign of the experience gap") {
    YearSeries r = constant_returns(1900, 2009, 0.05);
    for (long y = 1990; y <= 1999; ++y) r.values[static_cast<std::size_t>(y - 1900)] = 0.25;
    for (long y = 2000; y <= 2009; ++y) r.values[static_cast<std::size_t>(y - 1900)] = -0.15;
    for (double lambda : {0.0, 1.0, 3.0}) {
        const auto panel = experienced_returns(r, lambda, 1900, 2009);
        const auto pop = uniform_population(panel);
        CHECK(group_gap(panel, pop, 1999) < 0.0);
        CHECK(group_gap(panel, pop, 2009) > 0.0);
        CHECK(disagreement_std(panel, pop, 2009) > disagreement_std(panel, pop, 1989));
    }
}

TEST_CASE("detrending") {
    YearSeries t{1960, {}};
    for (long y = 1960; y <= 2020; ++y) t.values.push_back(0.3 * std::exp(0.04 * (y - 1960)));
    auto d = detrend_turnover(t);
    for (double e : d.residuals.values) CHECK(std::abs(e) < 1e-12);
    CHECK(d.slope == doctest::Approx(0.04).epsilon(1e-12));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (double& v : t.values) v *= u(rng);
    d = detrend_turnover(t);
    double sum = 0.0;
    for (double e : d.residuals.values) sum += e;
    CHECK(std::abs(sum) < 1e-12);
    YearSeries scaled = t;
    for (double& v : scaled.values) v *= 4.2;
    const auto ds = detrend_turnover(scaled);
    for (std::size_t i = 0; i < t.values.size(); ++i)
        CHECK(std::abs(ds.residuals.values[i] - d.residuals.values[i]) < 1e-12);

    // log values (0, 1, 3): slope 1.5, residuals (1/6, -1/3, 1/6).
    const auto h = detrend_turnover({2000, {1.0, std::exp(1.0), std::exp(3.0)}});
    CHECK(h.slope == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(h.residuals.values[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(h.residuals.values[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
    CHECK(h.residuals.values[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-13));

    CHECK_THROWS_AS(detrend_turnover({2000, {1.0, 0.0, 2.0}}), ValidationError);
    CHECK_THROWS_AS(detrend_turnover({2000, {1.0}}), ValidationError);
}

TEST_CASE("moving average") {
    const YearSeries s{2000, {1.0, 2.0, 3.0}};
    const auto m = moving_average(s, 1);
    CHECK(m.first_year == 2001);
    CHECK(m.values == std::vector<double>{1.5, 2.5});
    CHECK(moving_average(s, 0).values == s.values);
    CHECK(moving_average(constant_returns(0, 20, 4.0), 5).values == std::vector<double>(16, 4.0));
    CHECK(moving_average(s, 5).values.empty());
    CHECK_THROWS_AS(moving_average(s, -1), ValidationError);
}

TEST_CASE("deflation") {
    const YearSeries nominal{2000, {0.10, 0.10}};
    const YearSeries cpi{1999, {100.0, 100.0, 110.0}};
    const auto r = deflate_returns(nominal, cpi);
    CHECK(r.first_year == 2000);
    CHECK(r.values[0] == doctest::Approx(0.10).epsilon(1e-15));
    CHECK(std::abs(r.values[1]) < 1e-15);
}

#pragma once

// Cohort-level constructions on observed annual data: experienced returns,
// old-minus-young experience gaps, cross-cohort disagreement, and turnover
// detrending.

#include <map>
#include <utility>
#include <vector>

namespace ebl {

// Contiguous annual series starting at first_year.
struct YearSeries {
    long first_year = 0;
    std::vector<double> values;

    long last_year() const { return first_year + static_cast<long>(values.size()) - 1; }
    bool covers(long a, long b) const { return !values.empty() && a >= first_year && b <= last_year() && a <= b; }
    double at(long year) const; // throws ValidationError outside the range
};

using YearCohort = std::pair<long, long>; // (year, birth_year)

// Population counts by (year, birth_year).
using PopulationPanel = std::map<YearCohort, double>;
// Experienced return by (year, birth_year).
using ExperiencePanel = std::map<YearCohort, double>;

// panel[y, b] = sum_k w(k, lambda, y - b) r_{y-k} for each cohort born in
// [first_birth, last_birth] and each year y with 0 <= y - b <= max_age that
// the returns cover. The birth-year return is included. Cohorts born before
// the series starts are dropped; an empty result is an error.
ExperiencePanel experienced_returns(const YearSeries& returns, double lambda, long first_birth, long last_birth,
                                    int max_age = 74);

// Population-weighted mean experience of cohorts aged >= old_min_age minus
// that of cohorts aged <= young_max_age at `year`.
double group_gap(const ExperiencePanel& panel, const PopulationPanel& pop, long year, int old_min_age = 60,
                 int young_max_age = 39);

// Population-weighted standard deviation of experience across cohorts alive
// at `year` (cohorts present in both panels with positive population).
double disagreement_std(const ExperiencePanel& panel, const PopulationPanel& pop, long year);

struct DetrendedSeries {
    YearSeries log_values;
    YearSeries residuals;
    double intercept = 0.0; // fitted at the mean year
    double slope = 0.0;     // per year
};

// Residuals of OLS of log(turnover) on {1, year}.
DetrendedSeries detrend_turnover(const YearSeries& turnover);

// Trailing mean over the current value and `lags` prior values; the series
// starts at first_year + lags.
YearSeries moving_average(const YearSeries& series, int lags);

// Real returns from nominal returns and a price index:
// (1 + r_y) CPI_{y-1} / CPI_y - 1. The result covers the years where both exist.
YearSeries deflate_returns(const YearSeries& nominal, const YearSeries& cpi);

} // namespace ebl

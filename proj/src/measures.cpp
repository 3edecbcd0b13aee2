#include "ebl/measures.hpp"

#include "ebl/beliefs.hpp"
#include "ebl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ebl {

double YearSeries::at(long year) const {
    if (!covers(year, year)) throw ValidationError("no observation for year " + std::to_string(year));
    return values[static_cast<std::size_t>(year - first_year)];
}

ExperiencePanel experienced_returns(const YearSeries& returns, double lambda, long first_birth, long last_birth,
                                    int max_age) {
    if (first_birth > last_birth) throw ValidationError("empty cohort range");
    if (max_age < 0) throw ValidationError("max_age must be >= 0");
    ExperiencePanel panel;
    std::vector<WeightVector> weights;
    for (long b = std::max(first_birth, returns.first_year); b <= last_birth; ++b) {
        const long last = std::min(returns.last_year(), b + max_age);
        for (long y = b; y <= last; ++y) {
            const auto age = static_cast<int>(y - b);
            while (static_cast<int>(weights.size()) <= age)
                weights.push_back(compute_weights(lambda, static_cast<int>(weights.size())));
            const WeightVector& w = weights[static_cast<std::size_t>(age)];
            double v = 0.0;
            for (int k = 0; k <= age; ++k) v += w[k] * returns.at(y - k);
            panel[{y, b}] = v;
        }
    }
    if (panel.empty())
        throw ValidationError("returns do not cover any cohort born in [" + std::to_string(first_birth) + ", " +
                              std::to_string(last_birth) + "]");
    return panel;
}

namespace {

struct Weighted {
    double value;
    double weight;
};

std::vector<Weighted> living(const ExperiencePanel& panel, const PopulationPanel& pop, long year, long min_age,
                             long max_age) {
    std::vector<Weighted> out;
    for (auto it = panel.lower_bound({year, std::numeric_limits<long>::min()});
         it != panel.end() && it->first.first == year; ++it) {
        const long age = year - it->first.second;
        if (age < min_age || age > max_age) continue;
        const auto p = pop.find(it->first);
        if (p == pop.end()) continue;
        if (p->second < 0.0) throw ValidationError("population counts must be >= 0");
        if (p->second > 0.0) out.push_back({it->second, p->second});
    }
    return out;
}

double weighted_mean(const std::vector<Weighted>& v) {
    double num = 0.0, den = 0.0;
    for (const auto& x : v) {
        num += x.weight * x.value;
        den += x.weight;
    }
    return num / den;
}

} // namespace

double group_gap(const ExperiencePanel& panel, const PopulationPanel& pop, long year, int old_min_age,
                 int young_max_age) {
    const auto old = living(panel, pop, year, old_min_age, std::numeric_limits<long>::max());
    const auto young = living(panel, pop, year, 0, young_max_age);
    if (old.empty()) throw ValidationError("no old cohorts with population in " + std::to_string(year));
    if (young.empty()) throw ValidationError("no young cohorts with population in " + std::to_string(year));
    return weighted_mean(old) - weighted_mean(young);
}

double disagreement_std(const ExperiencePanel& panel, const PopulationPanel& pop, long year) {
    const auto all = living(panel, pop, year, 0, std::numeric_limits<long>::max());
    if (all.size() < 2)
        throw ValidationError("disagreement needs two cohorts with population in " + std::to_string(year));
    const double mean = weighted_mean(all);
    double num = 0.0, den = 0.0;
    for (const auto& x : all) {
        num += x.weight * (x.value - mean) * (x.value - mean);
        den += x.weight;
    }
    return std::sqrt(num / den);
}

DetrendedSeries detrend_turnover(const YearSeries& turnover) {
    const std::size_t n = turnover.values.size();
    if (n < 2) throw ValidationError("detrending needs at least two years");
    DetrendedSeries d;
    d.log_values.first_year = d.residuals.first_year = turnover.first_year;
    for (double v : turnover.values) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("turnover must be > 0");
        d.log_values.values.push_back(std::log(v));
    }
    // Centered years keep the two-parameter fit well conditioned.
    const double ybar = turnover.first_year + (static_cast<double>(n) - 1.0) / 2.0;
    double lbar = 0.0;
    for (double l : d.log_values.values) lbar += l;
    lbar /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = turnover.first_year + static_cast<double>(i) - ybar;
        sxy += x * (d.log_values.values[i] - lbar);
        sxx += x * x;
    }
    d.slope = sxy / sxx;
    d.intercept = lbar;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = turnover.first_year + static_cast<double>(i) - ybar;
        d.residuals.values.push_back(d.log_values.values[i] - lbar - d.slope * x);
    }
    return d;
}

YearSeries moving_average(const YearSeries& series, int lags) {
    if (lags < 0) throw ValidationError("lags must be >= 0");
    YearSeries out;
    out.first_year = series.first_year + lags;
    const auto w = static_cast<std::size_t>(lags) + 1;
    for (std::size_t i = w - 1; i < series.values.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = i + 1 - w; j <= i; ++j) s += series.values[j];
        out.values.push_back(s / static_cast<double>(w));
    }
    return out;
}

YearSeries deflate_returns(const YearSeries& nominal, const YearSeries& cpi) {
    const long first = std::max(nominal.first_year, cpi.first_year + 1);
    const long last = std::min(nominal.last_year(), cpi.last_year());
    if (first > last) throw ValidationError("returns and price index do not overlap");
    YearSeries out;
    out.first_year = first;
    for (long y = first; y <= last; ++y) {
        const double c0 = cpi.at(y - 1), c1 = cpi.at(y);
        if (!(c0 > 0.0) || !(c1 > 0.0)) throw ValidationError("price index must be > 0");
        out.values.push_back((1.0 + nominal.at(y)) * c0 / c1 - 1.0);
    }
    return out;
}

} // namespace ebl

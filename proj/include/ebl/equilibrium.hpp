#pragma once

// Closed-form linear equilibrium with myopic experience-based learners.

#include "ebl/beliefs.hpp"
#include "ebl/economy.hpp"

#include <map>
#include <vector>

namespace ebl {

// w[k] = (1/q) sum_{age<q} w(k, lambda, age): the average weight the trading
// cohorts put on d_{t-k}.
struct AvgWeights {
    std::vector<double> w;
};

// Holdings of every trading cohort at `time`, keyed by birth date.
struct DemandProfile {
    long time = 0;
    std::map<long, double> holdings;

    double mean_holding() const;
};

struct PriceMoments {
    double variance = 0.0;
    std::vector<double> autocov;  // autocov[j-1] = cov(p_{t+j}, p_t), j = 1..max_lag
    std::vector<double> autocorr; // autocov / variance
};

// Known-mean benchmark.
struct BenchmarkSolution {
    double price = 0.0;
    double holding = 1.0;
};

// s_{t+1} = constant + sum_j loadings[j] * d_{t+1-j}; loadings[0] multiplies
// d_{t+1}. Entries for j > q are identically zero and not stored.
struct ExcessPayoffRule {
    double constant = 0.0;
    std::vector<double> loadings;
};

// Decomposition of dx/dd_{t-k} for one cohort. The price channel is common to
// all cohorts trading at t.
struct DemandSensitivity {
    double belief_channel = 0.0;
    double price_channel = 0.0;
    double total = 0.0;
};

double cara_static_demand(double mu, double var, double risk_aversion);

AvgWeights average_weights(const EconomyParams& params);

PriceCoefficients solve_myopic_prices(const EconomyParams& params);

// Two-cohort closed forms for (alpha, beta_0, beta_1); used as an oracle for
// the general-q solver and as the demographic baseline.
PriceCoefficients toy_prices_q2(const EconomyParams& params);

// Myopic CARA demand of cohort `birth_time` at `now`; zero outside the trading
// window [now-q+1, now].
double myopic_demand(const EconomyParams& params, const PriceCoefficients& coeffs,
                     const DividendHistory& history, long birth_time, long now);

DemandProfile myopic_demand_profile(const EconomyParams& params, const PriceCoefficients& coeffs,
                                    const DividendHistory& history, long now);

// Subjective expected excess payoff E_t^n[s_{t+1}] given belief theta.
double expected_excess_payoff(const EconomyParams& params, const PriceCoefficients& coeffs,
                              const DividendHistory& history, long now, double theta);

BenchmarkSolution benchmark_known_mean(const EconomyParams& params);

PriceMoments price_moments(const PriceCoefficients& coeffs, double sigma, int max_lag = -1);

DemandSensitivity demand_sensitivity(const EconomyParams& params, const PriceCoefficients& coeffs,
                                     long birth_time, long now, int lag);

// d(x^young - x^old)/d d_{t-k}; the price channel cancels.
double demand_sensitivity_gap(const EconomyParams& params, const PriceCoefficients& coeffs,
                              long younger_birth, long older_birth, long now, int lag);

// Largest k0 such that the younger cohort is strictly more sensitive than the older one
// for every lag 0..k0 (-1 if none).
int sensitivity_threshold(const EconomyParams& params, const PriceCoefficients& coeffs,
                          long younger_birth, long older_birth, long now);

// xi(n, k, t) = x_t^n - x_t^{n+k} via the belief gap.
double holding_gap(const EconomyParams& params, const PriceCoefficients& coeffs,
                   const DividendHistory& history, long n, int k, long t);

ExcessPayoffRule excess_return_coeffs(const PriceCoefficients& coeffs, double R);

double price_at(const PriceCoefficients& coeffs, const DividendHistory& history, long t);

} // namespace ebl

#pragma once

// Two-cohort economy with an unexpected one-time change in cohort size, and
// with constant population growth.

#include "ebl/beliefs.hpp"
#include "ebl/economy.hpp"

#include <vector>

namespace ebl {

// Every cohort has mass y except the one born at tau, which has mass y_tau.
struct DemographicShock {
    long tau = 0;
    double y = 0.5;
    double y_tau = 0.5;

    void validate() const;
};

// Price rule p_tau = a_tau + b0_tau d_tau + b1_tau d_{tau-1}, likewise at
// tau+1. `baseline` is the rule at every other date for total mass 2y.
struct ShockPricing {
    double a_tau = 0.0, b0_tau = 0.0, b1_tau = 0.0;
    double a_tau1 = 0.0, b0_tau1 = 0.0, b1_tau1 = 0.0;
    PriceCoefficients baseline;
};

struct ClearingResiduals {
    double at_tau = 0.0;
    double at_tau1 = 0.0;
};

struct PricePath {
    std::vector<long> times;
    std::vector<double> prices;
    std::vector<double> excess_returns; // p_{t+1} + d_{t+1} - R p_t, dated t+1; NaN at the first date
};

struct GrowthParams {
    double g = 0.0;  // young-cohort mass grows at rate g
    double y0 = 0.5; // young mass at t = 0

    void validate() const;
};

// p_t = alpha0 (1+g)^{-t} + beta0 d_t + beta1 d_{t-1}.
struct GrowthPricing {
    double alpha0 = 0.0;
    double beta0 = 0.0;
    double beta1 = 0.0;

    double price(long t, double d_t, double d_prev, double g) const;
};

ShockPricing solve_shock_pricing(const EconomyParams& params, const DemographicShock& shock);

// Aggregate demand minus unit supply at tau and tau+1 for the given dividends,
// with each cohort's demand computed from its own beliefs and next-period
// price rule.
ClearingResiduals shock_clearing_residuals(const EconomyParams& params, const DemographicShock& shock,
                                           const ShockPricing& pricing, double d_before, double d_tau,
                                           double d_after);

// Prices at every date of `history` from its second observation on.
PricePath shock_price_path(const EconomyParams& params, const DemographicShock& shock,
                           const DividendHistory& history);

GrowthPricing solve_growth_pricing(const EconomyParams& params, const GrowthParams& growth);

// Aggregate demand minus supply at date t >= 1 under population growth.
double growth_clearing_residual(const EconomyParams& params, const GrowthParams& growth,
                                const GrowthPricing& pricing, long t, double d_prev, double d_t);

} // namespace ebl

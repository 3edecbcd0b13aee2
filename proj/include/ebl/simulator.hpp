#pragma once

// Monte Carlo paths of the economy: i.i.d. Gaussian dividends, the affine
// price rule, every trading cohort's holdings and trade volume.

#include "ebl/beliefs.hpp"
#include "ebl/economy.hpp"
#include "ebl/equilibrium.hpp"
#include "ebl/trade_volume.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace ebl {

enum class Regime { kMyopic, kNonMyopicQ2 };

std::string_view to_string(Regime r);
Regime parse_regime(std::string_view s);

struct SimConfig {
    std::uint64_t seed = 0;
    long T = 1000;      // recorded periods t = 0..T-1
    long burn_in = 2;   // dividends drawn from t = -burn_in
    EconomyParams params;
    Regime regime = Regime::kMyopic;
    TurnoverConvention convention = TurnoverConvention::kInterior;
    std::uint64_t path_index = 0; // selects the random substream

    // sigma = 0 is allowed here: dividends are then constant at theta.
    void validate() const;
};

struct SimPath {
    EconomyParams params;
    PriceCoefficients coeffs;
    DividendHistory history; // every draw, burn-in included

    // Aligned over t = 0..T-1.
    std::vector<double> dividends;
    std::vector<double> prices;
    std::vector<double> excess_returns; // p_t + d_t - R p_{t-1}
    std::vector<double> tv;
    std::vector<double> holdings; // holdings[t * q + age]
    double max_clearing_residual = 0.0;

    long length() const { return static_cast<long>(prices.size()); }
    double holding(long t, int age) const {
        return holdings[static_cast<std::size_t>(t * params.q + age)];
    }
    DemandProfile demand_profile(long t) const;
};

// Coefficients for the configured regime. Loadings do not depend on sigma and
// the constant scales with sigma^2, which covers sigma = 0.
PriceCoefficients solve_regime(const SimConfig& config);

SimPath simulate(const SimConfig& config);
// Uses the given rule instead of solving; it must have q loadings.
SimPath simulate(const SimConfig& config, const PriceCoefficients& coeffs);

// Paths path_index, path_index+1, ...; OpenMP over paths, merged by index.
std::vector<SimPath> simulate_batch(const SimConfig& config, const PriceCoefficients& coeffs, int n_paths);
// Same paths computed one after another.
std::vector<SimPath> simulate_batch_serial(const SimConfig& config, const PriceCoefficients& coeffs,
                                           int n_paths);

struct SampleMoments {
    PriceMoments moments;
    double mean = 0.0;
    double variance_se = 0.0;
    std::vector<double> autocov_se;
    long n_obs = 0;
    int bandwidth = 0; // Bartlett lags in the standard errors
};

// Sample variance and autocovariances of prices with Newey-West (Bartlett)
// standard errors. Requires T >= 10 max_lag.
SampleMoments estimate_moments(const SimPath& path, int max_lag);

struct RegressionResult {
    std::vector<double> coefficients; // intercept, then d_t, d_{t-1}, ...
    std::vector<double> standard_errors; // heteroskedasticity-robust (HC0)
    long n_obs = 0;
    double r_squared = 0.0;

    double t_stat(std::size_t i) const { return coefficients[i] / standard_errors[i]; }
};

// OLS of (p_{t+1} + d_{t+1}) / p_t - R on an intercept and d_t..d_{t-lags+1}.
RegressionResult predictability_regression(const SimPath& path, int lags);

} // namespace ebl

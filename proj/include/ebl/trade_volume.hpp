#pragma once

// Trade volume from position changes and from belief dispersion.

#include "ebl/beliefs.hpp"
#include "ebl/economy.hpp"

#include <map>
#include <string_view>
#include <vector>

namespace ebl {

// Which position changes count toward TV_t. All three normalize by 1/q.
enum class TurnoverConvention {
    // Slots n = t-q..t: the newborn enters from zero and the exiting cohort
    // liquidates to zero.
    kEntryExit,
    // Slots n = t-q+1..t: the newborn takes over the exiting cohort's
    // position, so its change is x_t^t - x_{t-1}^{t-q}. Zero in steady state.
    kReplacement,
    // Slots n = t-q+1..t-1: only cohorts that trade at both dates.
    kInterior,
};

std::string_view to_string(TurnoverConvention c);
TurnoverConvention parse_turnover_convention(std::string_view s);

// Beliefs assigned to the entrant at t-1 and the exiter at t in the belief
// form under kEntryExit.
enum class BoundaryBelief {
    // The belief at which demand is exactly zero given that date's prices.
    // With it the belief form equals the definition identically.
    kZeroDemand,
    // theta = 0 literally. Not equivalent to the definition unless the
    // zero-demand belief happens to be zero.
    kLiteralZero,
};

struct TradeVolumePoint {
    long time = 0;
    double tv = 0.0;
    std::map<long, double> per_cohort_changes; // birth_time -> x_t^n - x_{t-1}^n
};

// Requires history to cover [t-q, t].
TradeVolumePoint trade_volume_definition(const EconomyParams& params, const PriceCoefficients& coeffs,
                                         const DividendHistory& history, long t,
                                         TurnoverConvention convention = TurnoverConvention::kEntryExit);

double trade_volume_beliefs(const EconomyParams& params, const PriceCoefficients& coeffs,
                            const DividendHistory& history, long t,
                            TurnoverConvention convention = TurnoverConvention::kEntryExit,
                            BoundaryBelief boundary = BoundaryBelief::kZeroDemand);

std::vector<TradeVolumePoint> trade_volume_series(const EconomyParams& params,
                                                  const PriceCoefficients& coeffs,
                                                  const DividendHistory& history, long first,
                                                  long last, TurnoverConvention convention);

// Belief at which a cohort's demand at `time` is zero.
double zero_demand_belief(const EconomyParams& params, const PriceCoefficients& coeffs,
                          const DividendHistory& history, long time);

// TV after a long constant stretch at d_bar followed by d_t; sums over the q
// cohorts trading at t.
double thought_experiment_tv(const EconomyParams& params, const PriceCoefficients& coeffs,
                             double d_bar, double d_t);

// Two-cohort closed form (1-omega)|d_t - d_{t-1}| / (2 gamma sigma^2 (1+beta_0)).
double toy_trade_volume_q2(const EconomyParams& params, const PriceCoefficients& coeffs,
                           double d_prev, double d_t);

} // namespace ebl

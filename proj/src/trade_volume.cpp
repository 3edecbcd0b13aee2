#include "ebl/trade_volume.hpp"

#include "ebl/equilibrium.hpp"
#include "ebl/error.hpp"

#include <cmath>
#include <string>

namespace ebl {

std::string_view to_string(TurnoverConvention c) {
    switch (c) {
    case TurnoverConvention::kEntryExit: return "entry_exit";
    case TurnoverConvention::kReplacement: return "replacement";
    case TurnoverConvention::kInterior: return "interior";
    }
    return "unknown";
}

TurnoverConvention parse_turnover_convention(std::string_view s) {
    if (s == "entry_exit") return TurnoverConvention::kEntryExit;
    if (s == "replacement") return TurnoverConvention::kReplacement;
    if (s == "interior") return TurnoverConvention::kInterior;
    throw ValidationError("unknown turnover convention '" + std::string(s) +
                          "' (expected entry_exit, replacement or interior)");
}

namespace {

void require_window(const EconomyParams& p, const DividendHistory& h, long t) {
    if (!h.covers(t - p.q, t))
        throw ValidationError("trade volume at t=" + std::to_string(t) + " needs dividends from " +
                              std::to_string(t - p.q));
}

double chi(const EconomyParams& p, const PriceCoefficients& c) {
    const double b0 = c.beta(0);
    if (b0 == -1.0) throw ValidationError("beta_0 = -1 leaves demand undefined");
    return 1.0 / (p.gamma * p.sigma * p.sigma * (1.0 + b0));
}

double belief(const EconomyParams& p, const DividendHistory& h, long birth, long now) {
    return ebl_belief(h, birth, now, p.lambda).subjective_mean;
}

double dispersion(const std::vector<double>& changes, double mean, int q) {
    double ss = 0.0;
    for (double d : changes) ss += (d - mean) * (d - mean);
    return std::sqrt(ss / q);
}

} // namespace

double zero_demand_belief(const EconomyParams& params, const PriceCoefficients& coeffs,
                          const DividendHistory& history, long time) {
    return -expected_excess_payoff(params, coeffs, history, time, 0.0) / (1.0 + coeffs.beta(0));
}

TradeVolumePoint trade_volume_definition(const EconomyParams& params, const PriceCoefficients& coeffs,
                                         const DividendHistory& history, long t,
                                         TurnoverConvention convention) {
    params.validate();
    require_window(params, history, t);
    const int q = params.q;
    auto x = [&](long n, long s) { return myopic_demand(params, coeffs, history, n, s); };

    TradeVolumePoint pt;
    pt.time = t;
    switch (convention) {
    case TurnoverConvention::kEntryExit:
        for (long n = t - q; n <= t; ++n) pt.per_cohort_changes[n] = x(n, t) - x(n, t - 1);
        break;
    case TurnoverConvention::kReplacement:
        for (long n = t - q + 1; n < t; ++n) pt.per_cohort_changes[n] = x(n, t) - x(n, t - 1);
        pt.per_cohort_changes[t] = x(t, t) - x(t - q, t - 1);
        break;
    case TurnoverConvention::kInterior:
        for (long n = t - q + 1; n < t; ++n) pt.per_cohort_changes[n] = x(n, t) - x(n, t - 1);
        break;
    }
    double ss = 0.0;
    for (const auto& [n, dx] : pt.per_cohort_changes) ss += dx * dx;
    pt.tv = std::sqrt(ss / q);
    return pt;
}

double trade_volume_beliefs(const EconomyParams& params, const PriceCoefficients& coeffs,
                            const DividendHistory& history, long t, TurnoverConvention convention,
                            BoundaryBelief boundary) {
    params.validate();
    require_window(params, history, t);
    const int q = params.q;
    const double c = chi(params, coeffs);

    // Belief changes of cohorts trading at both t-1 and t.
    std::vector<double> interior;
    for (long n = t - q + 1; n < t; ++n)
        interior.push_back(belief(params, history, n, t) - belief(params, history, n, t - 1));
    const double newborn_vs_exiter = belief(params, history, t, t) - belief(params, history, t - q, t - 1);

    // Market clearing pins the common price-channel shift to minus the mean
    // belief change over the q replacement slots.
    std::vector<double> slots = interior;
    slots.push_back(newborn_vs_exiter);
    double mean_q = 0.0;
    for (double d : slots) mean_q += d;
    mean_q /= q;

    switch (convention) {
    case TurnoverConvention::kReplacement:
        return c * dispersion(slots, mean_q, q);
    case TurnoverConvention::kInterior:
        return c * dispersion(interior, mean_q, q);
    case TurnoverConvention::kEntryExit:
        break;
    }

    double entrant_prev = 0.0;
    double exiter_now = 0.0;
    if (boundary == BoundaryBelief::kZeroDemand) {
        entrant_prev = zero_demand_belief(params, coeffs, history, t - 1);
        exiter_now = zero_demand_belief(params, coeffs, history, t);
    }
    std::vector<double> all = interior;
    all.push_back(belief(params, history, t, t) - entrant_prev);
    all.push_back(exiter_now - belief(params, history, t - q, t - 1));
    double sum = 0.0;
    for (double d : all) sum += d;
    // The literal form divides the q+1 changes by q.
    const double mean = boundary == BoundaryBelief::kZeroDemand ? sum / (q + 1) : sum / q;
    return c * dispersion(all, mean, q);
}

std::vector<TradeVolumePoint> trade_volume_series(const EconomyParams& params,
                                                  const PriceCoefficients& coeffs,
                                                  const DividendHistory& history, long first,
                                                  long last, TurnoverConvention convention) {
    if (first > last) throw ValidationError("trade_volume_series: empty range");
    std::vector<TradeVolumePoint> out;
    out.reserve(static_cast<std::size_t>(last - first + 1));
    for (long t = first; t <= last; ++t)
        out.push_back(trade_volume_definition(params, coeffs, history, t, convention));
    return out;
}

double thought_experiment_tv(const EconomyParams& params, const PriceCoefficients& coeffs,
                             double d_bar, double d_t) {
    params.validate();
    const int q = params.q;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int age = 0; age < q; ++age) {
        const double w0 = experience_weight(0, params.lambda, age);
        s1 += w0;
        s2 += w0 * w0;
    }
    const double m = s1 / q;
    const double disp = std::max(0.0, s2 / q - m * m);
    return std::abs(d_t - d_bar) * chi(params, coeffs) * std::sqrt(disp);
}

double toy_trade_volume_q2(const EconomyParams& params, const PriceCoefficients& coeffs,
                           double d_prev, double d_t) {
    params.validate();
    if (params.q != 2) throw ValidationError("toy_trade_volume_q2 requires q = 2");
    const double one_minus_omega = 1.0 / (1.0 + std::exp2(params.lambda));
    return one_minus_omega * std::abs(d_t - d_prev) * chi(params, coeffs) / 2.0;
}

} // namespace ebl

#include "ebl/demographics.hpp"

#include "ebl/equilibrium.hpp"
#include "ebl/error.hpp"

#include <cmath>
#include <limits>

namespace ebl {

namespace {

void require_q2(const EconomyParams& p) {
    p.validate();
    if (p.q != 2) throw ValidationError("demographic pricing requires q = 2");
}

double omega_of(double lambda) { return 1.0 / (1.0 + std::exp2(-lambda)); }

} // namespace

void DemographicShock::validate() const {
    if (!(y > 0.0) || !std::isfinite(y)) throw ValidationError("y must be > 0");
    if (!(y_tau > 0.0) || !std::isfinite(y_tau)) throw ValidationError("y_tau must be > 0");
}

void GrowthParams::validate() const {
    if (!(1.0 + g > 0.0) || !std::isfinite(g)) throw ValidationError("growth rate must exceed -1");
    if (!(y0 > 0.0) || !std::isfinite(y0)) throw ValidationError("y0 must be > 0");
}

double GrowthPricing::price(long t, double d_t, double d_prev, double g) const {
    return alpha0 * std::pow(1.0 + g, -static_cast<double>(t)) + beta0 * d_t + beta1 * d_prev;
}

ShockPricing solve_shock_pricing(const EconomyParams& params, const DemographicShock& shock) {
    require_q2(params);
    shock.validate();
    const double R = params.R;
    const double om = omega_of(params.lambda);
    const double y = shock.y;
    const double yt = shock.y_tau;
    const double m = 2.0 * y;
    const double mt = y + yt;
    const double s2 = params.sigma * params.sigma;

    ShockPricing sp;
    sp.baseline = toy_prices_q2(params);
    // The loadings do not depend on total mass; the constant scales as 1/m.
    sp.baseline.alpha /= m;
    const double a = sp.baseline.alpha;
    const double b0 = sp.baseline.betas[0];
    const double b1 = sp.baseline.betas[1];

    // tau+1: young of mass y and the shocked cohort (now old) price against
    // the baseline rule at tau+2.
    sp.a_tau1 = a / R * (1.0 + (R - 1.0) * m / mt);
    sp.b0_tau1 = b1 / R + (1.0 + b0) * (y + yt * om) / (R * mt);
    sp.b1_tau1 = b1 * (yt / mt) * (m / y);

    // tau: the shocked cohort is young and prices against the tau+1 rule.
    const double g1 = params.gamma * (1.0 + sp.b0_tau1) * (1.0 + sp.b0_tau1) * s2;
    sp.a_tau = (sp.a_tau1 - g1 / mt) / R;
    sp.b0_tau = (1.0 + sp.b0_tau1) * (yt + y * om) / (R * mt) + (1.0 + b0) * (yt / mt) * (1.0 - om) / (R * R);
    sp.b1_tau = (1.0 + sp.b0_tau1) * (y / mt) * (1.0 - om) / R;
    return sp;
}

ClearingResiduals shock_clearing_residuals(const EconomyParams& params, const DemographicShock& shock,
                                           const ShockPricing& sp, double d_before, double d_tau,
                                           double d_after) {
    require_q2(params);
    shock.validate();
    const double R = params.R;
    const double om = omega_of(params.lambda);
    const double s2 = params.sigma * params.sigma;
    const auto& base = sp.baseline;

    auto demand = [&](double expected_next, double p_now, double next_b0) {
        return (expected_next - R * p_now) / (params.gamma * (1.0 + next_b0) * (1.0 + next_b0) * s2);
    };

    ClearingResiduals r;

    // tau+1: next price is baseline.
    {
        const double p = sp.a_tau1 + sp.b0_tau1 * d_after + sp.b1_tau1 * d_tau;
        auto next = [&](double theta) {
            return base.alpha + (1.0 + base.betas[0]) * theta + base.betas[1] * d_after;
        };
        const double young = demand(next(d_after), p, base.betas[0]);
        const double old = demand(next(om * d_after + (1.0 - om) * d_tau), p, base.betas[0]);
        r.at_tau1 = shock.y * young + shock.y_tau * old - 1.0;
    }
    // tau: next price is the tau+1 rule.
    {
        const double p = sp.a_tau + sp.b0_tau * d_tau + sp.b1_tau * d_before;
        auto next = [&](double theta) {
            return sp.a_tau1 + (1.0 + sp.b0_tau1) * theta + sp.b1_tau1 * d_tau;
        };
        const double young = demand(next(d_tau), p, sp.b0_tau1);
        const double old = demand(next(om * d_tau + (1.0 - om) * d_before), p, sp.b0_tau1);
        r.at_tau = shock.y_tau * young + shock.y * old - 1.0;
    }
    return r;
}

PricePath shock_price_path(const EconomyParams& params, const DemographicShock& shock,
                           const DividendHistory& history) {
    if (history.size() < 2) throw ValidationError("shock_price_path needs at least two dividends");
    const ShockPricing sp = solve_shock_pricing(params, shock);
    const auto& base = sp.baseline;
    PricePath path;
    for (long t = history.origin_time() + 1; t <= history.last_time(); ++t) {
        const double d = history.at(t);
        const double dp = history.at(t - 1);
        double p;
        if (t == shock.tau)
            p = sp.a_tau + sp.b0_tau * d + sp.b1_tau * dp;
        else if (t == shock.tau + 1)
            p = sp.a_tau1 + sp.b0_tau1 * d + sp.b1_tau1 * dp;
        else
            p = base.alpha + base.betas[0] * d + base.betas[1] * dp;
        const double er = path.prices.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : p + d - params.R * path.prices.back();
        path.times.push_back(t);
        path.prices.push_back(p);
        path.excess_returns.push_back(er);
    }
    return path;
}

GrowthPricing solve_growth_pricing(const EconomyParams& params, const GrowthParams& growth) {
    require_q2(params);
    growth.validate();
    const double R = params.R;
    const double g = growth.g;
    const double om = omega_of(params.lambda);
    const double young_share = (1.0 + g) / (2.0 + g);
    const double R_eff = R - 1.0 / (1.0 + g);
    if (!(R_eff > 0.0)) throw ValidationError("growth pricing requires R > 1/(1+g)");

    // R b0 = (1+b0) c0 + b1 and R b1 = (1+b0) c1; eliminate b1.
    const double c0 = young_share + (1.0 - young_share) * om;
    const double c1 = (1.0 - young_share) * (1.0 - om);
    const double k = c0 + c1 / R;
    GrowthPricing gp;
    gp.beta0 = k / (R - k);
    gp.beta1 = (1.0 + gp.beta0) * c1 / R;
    gp.alpha0 = -params.gamma * (1.0 + gp.beta0) * (1.0 + gp.beta0) * params.sigma * params.sigma *
                (1.0 + g) / (R_eff * growth.y0 * (2.0 + g));
    return gp;
}

double growth_clearing_residual(const EconomyParams& params, const GrowthParams& growth,
                                const GrowthPricing& gp, long t, double d_prev, double d_t) {
    require_q2(params);
    growth.validate();
    if (t < 1) throw ValidationError("growth clearing needs t >= 1");
    const double g = growth.g;
    const double om = omega_of(params.lambda);
    const double p = gp.price(t, d_t, d_prev, g);
    const double G = params.gamma * (1.0 + gp.beta0) * (1.0 + gp.beta0) * params.sigma * params.sigma;
    const double next_const = gp.alpha0 * std::pow(1.0 + g, -static_cast<double>(t + 1));
    auto demand = [&](double theta) {
        return (next_const + (1.0 + gp.beta0) * theta + gp.beta1 * d_t - params.R * p) / G;
    };
    const double y_t = growth.y0 * std::pow(1.0 + g, static_cast<double>(t));
    const double y_prev = y_t / (1.0 + g);
    return y_t * demand(d_t) + y_prev * demand(om * d_t + (1.0 - om) * d_prev) - 1.0;
}

} // namespace ebl

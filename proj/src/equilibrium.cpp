#include "ebl/equilibrium.hpp"

#include "ebl/error.hpp"

#include <cmath>
#include <string>

namespace ebl {

namespace {

double demand_scale(const EconomyParams& p, const PriceCoefficients& c) {
    const double b0 = c.beta(0);
    if (b0 == -1.0) throw ValidationError("beta_0 = -1 leaves demand undefined");
    return p.gamma * (1.0 + b0) * (1.0 + b0) * p.sigma * p.sigma;
}

void require_trading(const EconomyParams& p, long birth, long now) {
    if (birth > now || birth < now - p.q + 1)
        throw ValidationError("cohort born at " + std::to_string(birth) + " does not trade at " +
                              std::to_string(now));
}

} // namespace

double DemandProfile::mean_holding() const {
    if (holdings.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [birth, x] : holdings) s += x;
    return s / static_cast<double>(holdings.size());
}

double cara_static_demand(double mu, double var, double risk_aversion) {
    if (!(var > 0.0)) throw ValidationError("cara_static_demand: var must be > 0");
    if (!(risk_aversion > 0.0)) throw ValidationError("cara_static_demand: a must be > 0");
    return mu / (risk_aversion * var);
}

AvgWeights average_weights(const EconomyParams& params) {
    params.validate();
    AvgWeights out{std::vector<double>(static_cast<std::size_t>(params.q), 0.0)};
    for (int age = 0; age < params.q; ++age) {
        const WeightVector w = compute_weights(params.lambda, age);
        for (int k = 0; k <= age; ++k) out.w[static_cast<std::size_t>(k)] += w[k];
    }
    for (double& x : out.w) x /= params.q;
    return out;
}

PriceCoefficients solve_myopic_prices(const EconomyParams& params) {
    const AvgWeights aw = average_weights(params);
    const int q = params.q;
    const double R = params.R;

    // tail[k] = sum_{j=0}^{q-1-k} w_{k+j} / R^{j+1}
    std::vector<double> tail(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) {
        double s = 0.0;
        double rpow = 1.0;
        for (int j = 0; j + k < q; ++j) {
            rpow *= R;
            s += aw.w[static_cast<std::size_t>(k + j)] / rpow;
        }
        tail[static_cast<std::size_t>(k)] = s;
    }
    const double denom = 1.0 - tail[0];
    if (!(denom > 0.0)) throw ValidationError("myopic price denominator is not positive");

    PriceCoefficients c;
    c.betas.resize(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) c.betas[static_cast<std::size_t>(k)] = tail[static_cast<std::size_t>(k)] / denom;
    c.alpha = -params.gamma * params.sigma * params.sigma / ((R - 1.0) * denom * denom);
    return c;
}

PriceCoefficients toy_prices_q2(const EconomyParams& params) {
    params.validate();
    if (params.q != 2) throw ValidationError("toy_prices_q2 requires q = 2");
    const double R = params.R;
    const double omega = 1.0 / (1.0 + std::exp2(-params.lambda));
    const double den = (R - 1.0) * (1.0 + 2.0 * R - omega);
    PriceCoefficients c;
    const double b0 = 2.0 * R * R / den - 1.0;
    const double b1 = R * (1.0 - omega) / den;
    c.betas = {b0, b1};
    c.alpha = -params.gamma * (1.0 + b0) * (1.0 + b0) * params.sigma * params.sigma / (R - 1.0);
    return c;
}

double price_at(const PriceCoefficients& coeffs, const DividendHistory& history, long t) {
    double p = coeffs.alpha;
    for (int k = 0; k < coeffs.lags(); ++k) p += coeffs.beta(k) * history.at(t - k);
    return p;
}

double expected_excess_payoff(const EconomyParams& params, const PriceCoefficients& coeffs,
                              const DividendHistory& history, long now, double theta) {
    double s = coeffs.alpha * (1.0 - params.R) + (1.0 + coeffs.beta(0)) * theta;
    for (int k = 0; k < coeffs.lags(); ++k) s += coeffs.payoff_loading(k, params.R) * history.at(now - k);
    return s;
}

double myopic_demand(const EconomyParams& params, const PriceCoefficients& coeffs,
                     const DividendHistory& history, long birth_time, long now) {
    params.validate();
    if (birth_time > now || birth_time < now - params.q + 1) return 0.0;
    const double G = demand_scale(params, coeffs);
    const double theta = ebl_belief(history, birth_time, now, params.lambda).subjective_mean;
    return expected_excess_payoff(params, coeffs, history, now, theta) / G;
}

DemandProfile myopic_demand_profile(const EconomyParams& params, const PriceCoefficients& coeffs,
                                    const DividendHistory& history, long now) {
    DemandProfile out{now, {}};
    for (long n = now - params.q + 1; n <= now; ++n)
        out.holdings[n] = myopic_demand(params, coeffs, history, n, now);
    return out;
}

BenchmarkSolution benchmark_known_mean(const EconomyParams& params) {
    params.validate();
    return {(params.theta - params.gamma * params.sigma * params.sigma) / (params.R - 1.0), 1.0};
}

PriceMoments price_moments(const PriceCoefficients& coeffs, double sigma, int max_lag) {
    if (!(sigma >= 0.0)) throw ValidationError("price_moments: sigma must be >= 0");
    const int q = coeffs.lags();
    if (max_lag < 0) max_lag = q;
    const double s2 = sigma * sigma;
    PriceMoments m;
    for (int k = 0; k < q; ++k) m.variance += coeffs.beta(k) * coeffs.beta(k);
    m.variance *= s2;
    for (int j = 1; j <= max_lag; ++j) {
        double c = 0.0;
        for (int k = 0; k + j < q; ++k) c += coeffs.beta(k) * coeffs.beta(k + j);
        m.autocov.push_back(s2 * c);
        m.autocorr.push_back(m.variance > 0.0 ? s2 * c / m.variance : 0.0);
    }
    return m;
}

DemandSensitivity demand_sensitivity(const EconomyParams& params, const PriceCoefficients& coeffs,
                                     long birth_time, long now, int lag) {
    params.validate();
    require_trading(params, birth_time, now);
    if (lag < 0 || lag >= params.q) throw ValidationError("demand_sensitivity: lag out of range");
    const double G = demand_scale(params, coeffs);
    const int age = static_cast<int>(now - birth_time);
    DemandSensitivity s;
    s.belief_channel = (1.0 + coeffs.beta(0)) * experience_weight(lag, params.lambda, age) / G;
    s.price_channel = coeffs.payoff_loading(lag, params.R) / G;
    s.total = s.belief_channel + s.price_channel;
    return s;
}

double demand_sensitivity_gap(const EconomyParams& params, const PriceCoefficients& coeffs,
                              long younger_birth, long older_birth, long now, int lag) {
    return demand_sensitivity(params, coeffs, younger_birth, now, lag).belief_channel -
           demand_sensitivity(params, coeffs, older_birth, now, lag).belief_channel;
}

int sensitivity_threshold(const EconomyParams& params, const PriceCoefficients& coeffs,
                          long younger_birth, long older_birth, long now) {
    int k0 = -1;
    for (int k = 0; k < params.q; ++k) {
        if (demand_sensitivity_gap(params, coeffs, younger_birth, older_birth, now, k) > 0.0)
            k0 = k;
        else
            break;
    }
    return k0;
}

double holding_gap(const EconomyParams& params, const PriceCoefficients& coeffs,
                   const DividendHistory& history, long n, int k, long t) {
    params.validate();
    require_trading(params, n, t);
    require_trading(params, n + k, t);
    const double b0 = coeffs.beta(0);
    if (b0 == -1.0) throw ValidationError("beta_0 = -1 leaves demand undefined");
    const double th_n = ebl_belief(history, n, t, params.lambda).subjective_mean;
    const double th_nk = ebl_belief(history, n + k, t, params.lambda).subjective_mean;
    return (th_n - th_nk) / (params.gamma * (1.0 + b0) * params.sigma * params.sigma);
}

ExcessPayoffRule excess_return_coeffs(const PriceCoefficients& coeffs, double R) {
    ExcessPayoffRule r;
    r.constant = coeffs.alpha * (1.0 - R);
    r.loadings.push_back(1.0 + coeffs.beta(0));
    for (int j = 1; j <= coeffs.lags(); ++j) r.loadings.push_back(coeffs.payoff_loading(j - 1, R));
    return r;
}

} // namespace ebl

#pragma once

#include <vector>

namespace ebl {

// Primitives of the OLG economy: each cohort trades for q periods, the riskless
// asset pays gross R, agents have CARA risk aversion gamma, dividends are
// i.i.d. N(theta, sigma^2), and lambda tilts experience weights toward recent
// observations.
struct EconomyParams {
    int q = 2;
    double R = 1.1;
    double gamma = 1.0;
    double sigma = 1.0;
    double theta = 0.0;
    double lambda = 0.0;

    // Throws ValidationError. sigma = 0 is accepted only when allow_zero_sigma
    // (deterministic simulations); every solver requires sigma > 0.
    void validate(bool allow_zero_sigma = false) const;
};

// Affine price rule p_t = alpha + sum_k betas[k] * d_{t-k}.
struct PriceCoefficients {
    double alpha = 0.0;
    std::vector<double> betas;

    int lags() const noexcept { return static_cast<int>(betas.size()); }
    double beta(int k) const noexcept {
        return (k >= 0 && k < lags()) ? betas[static_cast<std::size_t>(k)] : 0.0;
    }
    // beta(k) = beta_{k+1} - R beta_k, the loading of d_{t-k} in the excess
    // payoff s_{t+1} beyond the d_{t+1} term.
    double payoff_loading(int k, double R) const noexcept { return beta(k + 1) - R * beta(k); }
};

} // namespace ebl

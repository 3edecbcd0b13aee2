#pragma once

// Agents who maximize CARA utility of final wealth over their q trading
// periods. Each period's problem reduces to a static one under a tilted
// ("adjusted") Gaussian for the next dividend.

#include "ebl/economy.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace ebl {

class DividendHistory;

// Continuation factor exp(-A - B z - C z^2).
struct QuadraticExponential {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
};

// exp(-A - Bz - Cz^2) N(z; mu, sigma2) = K N(z; m, Sigma2).
struct AdjustedGaussianResult {
    double m = 0.0;
    double Sigma2 = 1.0;
    double K = 1.0;
    double log_K = 0.0;
};

AdjustedGaussianResult adjusted_gaussian(double A, double B, double C, double mu, double sigma2);
inline AdjustedGaussianResult adjusted_gaussian(const QuadraticExponential& f, double mu, double sigma2) {
    return adjusted_gaussian(f.A, f.B, f.C, mu, sigma2);
}

struct GralMaxResult {
    double xstar = 0.0;
    double value = 0.0;     // max_x E[-exp(-A-Bz-Cz^2) exp(-a x (f + e z))] < 0
    double log_loss = 0.0;  // log(-value)
};

// Optimal position against payoff h(z) = f + e z with risk aversion a.
GralMaxResult gral_max(double A, double B, double C, double mu, double sigma2, double e, double f,
                       double a);

// Demand of the cohort aged `age` at t is delta[age] + sum_k delta_k[age][k] d_{t-k}.
// Rows run over ages 0..q; row q (after exit) is zero. s2[age] is the
// adjusted variance of the next dividend at that age.
struct DeltaTable {
    int q = 0;
    int K_lag = 0; // price rule uses d_t..d_{t-K_lag}
    std::vector<double> delta;
    std::vector<std::vector<double>> delta_k;
    std::vector<double> s2;

    int width() const { return delta_k.empty() ? 0 : static_cast<int>(delta_k.front().size()); }
    double demand(int age, std::span<const double> recent) const; // recent[k] = d_{t-k}
};

// Exact backward induction over ages q-1..0 for a given affine price rule.
// The value function at each age is exponential-quadratic in the dividend
// window, and the whole quadratic form is carried, including the part that
// depends on the continuation normalizer.
DeltaTable demand_recursion(const EconomyParams& params, const PriceCoefficients& coeffs);

// Time-t demand of the cohort born at birth_time under a DeltaTable.
double nonmyopic_demand(const DeltaTable& table, const DividendHistory& history, long birth_time,
                        long now);

struct SolverOptions {
    double tolerance = 1e-10;
    int max_iterations = 1000;
};

struct SolverReport {
    int iterations = 0;
    double residual = 0.0;
};

struct NonMyopicQ2Solution {
    double alpha = 0.0;
    double beta0 = 0.0;
    double beta1 = 0.0;
    double s2 = 0.0; // adjusted variance faced by the young
    double l01 = 0.0;
    double l11 = 0.0;
    SolverReport solver;

    PriceCoefficients coeffs() const { return {alpha, {beta0, beta1}}; }
};

// The three two-cohort clearing conditions evaluated at (alpha, beta0, beta1).
std::array<double, 3> q2_conditions(const EconomyParams& params, double alpha, double beta0,
                                    double beta1);

NonMyopicQ2Solution solve_nonmyopic_q2(const EconomyParams& params, const SolverOptions& opts = {});

// Two-cohort demand coefficients in closed form:
// young[0] + young[1] d_t + young[2] d_{t-1}, likewise for old.
struct Q2DemandCoefficients {
    std::array<double, 3> young{};
    std::array<double, 3> old{};
};
Q2DemandCoefficients q2_demand_coefficients(const EconomyParams& params, const NonMyopicQ2Solution& sol);

struct NonMyopicSolution {
    PriceCoefficients coeffs;
    DeltaTable table;
    SolverReport solver;
};

// Market-clearing residuals scaled by gamma (1+beta_0)^2 sigma^2:
// [sum_age delta(age) - q, sum_age delta_k(age) for k = 0..q-1].
std::vector<double> clearing_residuals(const EconomyParams& params, const PriceCoefficients& coeffs);

// Damped Newton on the loadings from the myopic solution; the constant solves
// a linear equation at each step. Requires 2 <= q <= 15 and gamma >= 1e-6.
NonMyopicSolution solve_nonmyopic_general(const EconomyParams& params, const SolverOptions& opts = {});

struct SensitivityDecomposition {
    double beliefs_term = 0.0;
    double discount_term = 0.0;
    double dynamic_term = 0.0;
    double total = 0.0; // d(x_t^t - x_t^{t-1}) / d d_t
};

SensitivityDecomposition decompose_sensitivity(const NonMyopicQ2Solution& sol, const EconomyParams& params);

} // namespace ebl

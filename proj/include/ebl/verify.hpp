#pragma once

// Independent numerical oracles used by the acceptance checks and the CLI
// `check` command. They avoid the closed-form reductions they are meant to
// validate.

#include "ebl/economy.hpp"

#include <span>

namespace ebl {

struct BruteForceOptions {
    double nodes_per_sigma = 8.0;  // trapezoid spacing sigma / nodes_per_sigma
    double half_width_sigmas = 12.0;
    int golden_iterations = 90;
    // Solve the final trading period numerically too; when false the final
    // period uses the textbook CARA-normal demand.
    bool numeric_last_age = true;
};

// Position of the cohort aged `age` facing the affine price rule `coeffs`,
// found by backward induction with trapezoid quadrature over each future
// dividend and golden-section search over each position.
// recent[k] = d_{t-k}; needs max(coeffs.lags(), q) entries.
double brute_force_demand(const EconomyParams& params, const PriceCoefficients& coeffs,
                          std::span<const double> recent, int age, const BruteForceOptions& opts = {});

// Integral over z of exp(-A - Bz - Cz^2) N(z; mu, sigma2) / K, with K from
// the adjusted-Gaussian formula. The grid is placed around the numerically
// located peak of the integrand.
double tilted_density_mass(double A, double B, double C, double mu, double sigma2);

} // namespace ebl

#pragma once

// Experience weights and the three belief-formation rules: experience-based
// learning (EBL), full Bayesian learning (FBL) and Bayesian learning from
// experience (BLE).

#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace ebl {

// Recency weights of an agent who has lived `age` periods. weights[k] is the
// weight on the observation k periods back; lags beyond `age` weigh zero.
struct WeightVector {
    int age = 0;
    double lambda = 0.0;
    std::vector<double> weights;

    // Zero-padded access.
    double operator[](int k) const {
        return (k >= 0 && k <= age) ? weights[static_cast<std::size_t>(k)] : 0.0;
    }
};

// Dividend (or return) realizations on a contiguous integer time grid.
// values[0] is the realization at origin_time.
class DividendHistory {
public:
    DividendHistory() = default;
    DividendHistory(long origin_time, std::vector<double> values);

    long origin_time() const noexcept { return origin_; }
    long last_time() const noexcept { return origin_ + static_cast<long>(values_.size()) - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    bool covers(long first, long last) const noexcept {
        return first >= origin_ && last <= last_time() && first <= last;
    }

    // Throws ValidationError when t is outside the recorded range.
    double at(long t) const;

    std::span<const double> values() const noexcept { return values_; }

private:
    long origin_ = 0;
    std::vector<double> values_;
};

struct Belief {
    double subjective_mean = 0.0;
    double subjective_var = 1.0;
};

// Gaussian prior N(mean, var). var = +inf is the exact diffuse prior.
struct BayesPrior {
    double mean = 0.0;
    double var = 1.0;

    static BayesPrior diffuse() { return {0.0, std::numeric_limits<double>::infinity()}; }
};

struct EblRule {
    double lambda = 0.0;
};
struct FullBayesRule {
    BayesPrior prior;
};
struct ExperienceBayesRule {
    BayesPrior prior;
};

struct LearnerSpec {
    std::variant<EblRule, FullBayesRule, ExperienceBayesRule> kind;
    double dividend_var = 1.0; // sigma^2, known to agents

    void validate() const;
};

WeightVector compute_weights(double lambda, int age);

// Single weight w(k, lambda, age), zero for k outside [0, age].
double experience_weight(int k, double lambda, int age);

// F(m, age) = sum_{j<=m} w(j, lambda, age), 0 <= m <= age.
double cumulative_weights(const WeightVector& w, int m);

// theta_now for the cohort born at birth_time. The returned variance is
// dividend_var passed through unchanged.
Belief ebl_belief(const DividendHistory& history, long birth_time, long now, double lambda,
                  double dividend_var = 1.0);

// Posterior over every observation in `history` (the economy's time origin is
// history.origin_time()). N is the number of observations used.
Belief fbl_posterior(const DividendHistory& history, const LearnerSpec& spec);

// Same, using only observations dated origin..now. now < origin leaves zero
// observations and returns the prior.
Belief fbl_posterior(const DividendHistory& history, long now, const LearnerSpec& spec);

// Posterior over the cohort's lifetime observations [birth_time, now].
Belief ble_posterior(const DividendHistory& history, long birth_time, long now,
                     const LearnerSpec& spec);

// Conjugate normal update of `prior` with n observations of mean sample_mean.
Belief normal_posterior(const BayesPrior& prior, double dividend_var, std::size_t n,
                        double sample_mean);

} // namespace ebl

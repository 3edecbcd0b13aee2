#include "ebl/beliefs.hpp"

#include "ebl/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace ebl {

DividendHistory::DividendHistory(long origin_time, std::vector<double> values)
    : origin_(origin_time), values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("dividend history must be non-empty");
}

double DividendHistory::at(long t) const {
    if (t < origin_ || t > last_time()) {
        throw ValidationError("dividend history has no observation at t=" + std::to_string(t) +
                              " (covers " + std::to_string(origin_) + ".." +
                              std::to_string(last_time()) + ")");
    }
    return values_[static_cast<std::size_t>(t - origin_)];
}

void LearnerSpec::validate() const {
    if (!(dividend_var > 0.0) || !std::isfinite(dividend_var))
        throw ValidationError("dividend_var must be positive and finite");
    auto check_prior = [](const BayesPrior& p) {
        if (!(p.var > 0.0)) throw ValidationError("prior_var must be positive");
        if (!std::isfinite(p.mean)) throw ValidationError("prior mean must be finite");
    };
    if (const auto* f = std::get_if<FullBayesRule>(&kind)) check_prior(f->prior);
    if (const auto* b = std::get_if<ExperienceBayesRule>(&kind)) check_prior(b->prior);
    if (const auto* e = std::get_if<EblRule>(&kind); e && !std::isfinite(e->lambda))
        throw ValidationError("lambda must be finite");
}

WeightVector compute_weights(double lambda, int age) {
    if (!std::isfinite(lambda)) throw ValidationError("lambda must be finite");
    if (age < 0) throw ValidationError("age must be nonnegative");

    const auto n = static_cast<std::size_t>(age) + 1;
    std::vector<double> logw(n);
    for (std::size_t k = 0; k < n; ++k)
        logw[k] = lambda * std::log(static_cast<double>(n - k));

    // log-sum-exp keeps lambda in the hundreds finite.
    const double top = lambda >= 0.0 ? logw.front() : logw.back();
    double acc = 0.0;
    for (double l : logw) acc += std::exp(l - top);
    const double lse = top + std::log(acc);

    WeightVector out{age, lambda, std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) out.weights[k] = std::exp(logw[k] - lse);
    return out;
}

double experience_weight(int k, double lambda, int age) {
    if (k < 0 || k > age) return 0.0;
    return compute_weights(lambda, age).weights[static_cast<std::size_t>(k)];
}

double cumulative_weights(const WeightVector& w, int m) {
    if (m < 0 || m > w.age)
        throw ValidationError("cumulative_weights: m=" + std::to_string(m) + " outside [0, " +
                              std::to_string(w.age) + "]");
    if (m == w.age) return 1.0;
    return std::accumulate(w.weights.begin(), w.weights.begin() + m + 1, 0.0);
}

Belief ebl_belief(const DividendHistory& history, long birth_time, long now, double lambda,
                  double dividend_var) {
    if (birth_time > now) throw ValidationError("ebl_belief: birth_time after now");
    if (!history.covers(birth_time, now))
        throw ValidationError("ebl_belief: history does not cover the cohort's lifetime");
    const int age = static_cast<int>(now - birth_time);
    const WeightVector w = compute_weights(lambda, age);
    double mean = 0.0;
    for (int k = 0; k <= age; ++k) mean += w.weights[static_cast<std::size_t>(k)] * history.at(now - k);
    return {mean, dividend_var};
}

Belief normal_posterior(const BayesPrior& prior, double dividend_var, std::size_t n,
                        double sample_mean) {
    const double prior_prec = std::isinf(prior.var) ? 0.0 : 1.0 / prior.var;
    const double data_prec = static_cast<double>(n) / dividend_var;
    const double prec = prior_prec + data_prec;
    if (prec == 0.0) throw ValidationError("diffuse prior with no observations has no posterior");
    const double mean = (prior_prec == 0.0)
                            ? sample_mean
                            : (prior_prec * prior.mean + data_prec * sample_mean) / prec;
    // Predictive variance of the next dividend.
    return {mean, dividend_var + 1.0 / prec};
}

namespace {

double mean_over(const DividendHistory& h, long first, long last) {
    double s = 0.0;
    for (long t = first; t <= last; ++t) s += h.at(t);
    return s / static_cast<double>(last - first + 1);
}

} // namespace

Belief fbl_posterior(const DividendHistory& history, const LearnerSpec& spec) {
    return fbl_posterior(history, history.last_time(), spec);
}

Belief fbl_posterior(const DividendHistory& history, long now, const LearnerSpec& spec) {
    spec.validate();
    const auto* rule = std::get_if<FullBayesRule>(&spec.kind);
    if (!rule) throw ValidationError("fbl_posterior requires an FBL learner");
    if (now > history.last_time()) throw ValidationError("fbl_posterior: now beyond history");
    if (now < history.origin_time())
        return normal_posterior(rule->prior, spec.dividend_var, 0, 0.0);
    const auto n = static_cast<std::size_t>(now - history.origin_time() + 1);
    return normal_posterior(rule->prior, spec.dividend_var, n,
                            mean_over(history, history.origin_time(), now));
}

Belief ble_posterior(const DividendHistory& history, long birth_time, long now,
                     const LearnerSpec& spec) {
    spec.validate();
    const auto* rule = std::get_if<ExperienceBayesRule>(&spec.kind);
    if (!rule) throw ValidationError("ble_posterior requires a BLE learner");
    if (birth_time > now) throw ValidationError("ble_posterior: birth_time after now");
    if (!history.covers(birth_time, now))
        throw ValidationError("ble_posterior: history does not cover the cohort's lifetime");
    const auto n = static_cast<std::size_t>(now - birth_time + 1);
    return normal_posterior(rule->prior, spec.dividend_var, n, mean_over(history, birth_time, now));
}

} // namespace ebl

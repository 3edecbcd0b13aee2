#include "ebl/verify.hpp"

#include "ebl/beliefs.hpp"
#include "ebl/error.hpp"
#include "ebl/nonmyopic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace ebl {

namespace {

double log_sum_exp(const std::vector<double>& v) {
    const double top = *std::max_element(v.begin(), v.end());
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - top);
    return top + std::log(acc);
}

template <class F>
double golden_min(F&& f, double lo, double hi, int iters) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            hi = d, d = c, fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c, c = d, fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

class BruteForce {
public:
    BruteForce(const EconomyParams& p, const PriceCoefficients& c, const BruteForceOptions& o)
        : p_(p), c_(c), o_(o), L_(std::max(c.lags(), p.q)), e_(1.0 + c.beta(0)) {}

    int window() const { return L_; }

    // (position, log of the minimized expected exponential loss)
    std::pair<double, double> solve(const std::vector<double>& h, int age) const {
        const double s = p_.sigma;
        const double s2 = s * s;
        const WeightVector w = compute_weights(p_.lambda, age);
        double mu = 0.0;
        for (int k = 0; k <= age; ++k) mu += w[k] * h[static_cast<std::size_t>(k)];
        double c = c_.alpha * (1.0 - p_.R);
        for (int k = 0; k < L_; ++k) c += c_.payoff_loading(k, p_.R) * h[static_cast<std::size_t>(k)];
        const double D = p_.gamma * std::pow(p_.R, p_.q - 1 - age);
        const double x0 = (c + e_ * mu) / (D * e_ * e_ * s2);

        if (age == p_.q - 1 && !o_.numeric_last_age) {
            const double m = c + e_ * mu;
            return {x0, -m * m / (2.0 * e_ * e_ * s2)};
        }

        double half = 0.5 * (std::abs(x0) + 1.0);
        for (int attempt = 0; attempt < 8; ++attempt) {
            const double reach = std::abs(x0) + half;
            const double W = o_.half_width_sigmas * s + D * reach * std::abs(e_) * s2;
            const double dz = s / o_.nodes_per_sigma;
            const int n = static_cast<int>(std::ceil(2.0 * W / dz)) + 1;

            std::vector<double> z(static_cast<std::size_t>(n)), base(static_cast<std::size_t>(n));
            std::vector<double> next(h.size());
            for (int j = 0; j < n; ++j) {
                const double zj = mu - W + j * dz;
                z[static_cast<std::size_t>(j)] = zj;
                double cont = 0.0;
                if (age < p_.q - 1) {
                    next[0] = zj;
                    std::copy(h.begin(), h.end() - 1, next.begin() + 1);
                    cont = solve(next, age + 1).second;
                }
                base[static_cast<std::size_t>(j)] =
                    cont - (zj - mu) * (zj - mu) / (2.0 * s2) - 0.5 * std::log(2.0 * std::numbers::pi * s2);
            }
            std::vector<double> terms(static_cast<std::size_t>(n));
            auto objective = [&](double x) {
                for (int j = 0; j < n; ++j) {
                    const auto jj = static_cast<std::size_t>(j);
                    terms[jj] = base[jj] - D * x * (c + e_ * z[jj]);
                }
                return log_sum_exp(terms) + std::log(dz);
            };
            const double lo = x0 - half, hi = x0 + half;
            const double x = golden_min(objective, lo, hi, o_.golden_iterations);
            if (x - lo > 1e-3 * half && hi - x > 1e-3 * half) return {x, objective(x)};
            half *= 3.0;
        }
        throw ConvergenceError("brute-force demand search did not bracket the optimum", 8, 0.0);
    }

private:
    const EconomyParams& p_;
    const PriceCoefficients& c_;
    const BruteForceOptions& o_;
    int L_;
    double e_;
};

} // namespace

double brute_force_demand(const EconomyParams& params, const PriceCoefficients& coeffs,
                          std::span<const double> recent, int age, const BruteForceOptions& opts) {
    params.validate();
    if (age < 0 || age >= params.q) throw ValidationError("brute_force_demand: age out of range");
    BruteForce bf(params, coeffs, opts);
    if (recent.size() < static_cast<std::size_t>(bf.window()))
        throw ValidationError("brute_force_demand: not enough dividend lags");
    std::vector<double> h(recent.begin(), recent.begin() + bf.window());
    return bf.solve(h, age).first;
}

double tilted_density_mass(double A, double B, double C, double mu, double sigma2) {
    const auto g = adjusted_gaussian(A, B, C, mu, sigma2);
    auto logf = [&](double z) {
        return -A - B * z - C * z * z - (z - mu) * (z - mu) / (2.0 * sigma2) -
               0.5 * std::log(2.0 * std::numbers::pi * sigma2) - g.log_K;
    };
    // The log integrand is a concave quadratic: three evaluations give its
    // vertex and curvature.
    const double s = std::sqrt(sigma2);
    const double f0 = logf(mu), fp = logf(mu + s), fm = logf(mu - s);
    const double curv = -(fp - 2.0 * f0 + fm) / sigma2;
    const double slope = (fp - fm) / (2.0 * s);
    const double peak = mu + slope / curv;
    const double width = 1.0 / std::sqrt(curv);
    const int n = 4001;
    const double W = 40.0 * width;
    const double dz = 2.0 * W / (n - 1);
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) terms[static_cast<std::size_t>(j)] = logf(peak - W + j * dz);
    return std::exp(log_sum_exp(terms)) * dz;
}

} // namespace ebl

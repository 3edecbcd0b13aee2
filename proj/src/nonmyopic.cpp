#include "ebl/nonmyopic.hpp"

#include "ebl/beliefs.hpp"
#include "ebl/equilibrium.hpp"
#include "ebl/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace ebl {

AdjustedGaussianResult adjusted_gaussian(double A, double B, double C, double mu, double sigma2) {
    if (!(C >= 0.0)) throw ValidationError("adjusted_gaussian: C must be >= 0");
    if (!(sigma2 > 0.0)) throw ValidationError("adjusted_gaussian: sigma2 must be > 0");
    AdjustedGaussianResult r;
    const double tilt = 2.0 * C * sigma2 + 1.0;
    r.Sigma2 = sigma2 / tilt;
    r.m = r.Sigma2 * (mu / sigma2 - B);
    r.log_K = -0.5 * std::log(tilt) - (A + 0.5 * mu * mu / sigma2) + r.m * r.m / (2.0 * r.Sigma2);
    r.K = std::exp(r.log_K);
    return r;
}

GralMaxResult gral_max(double A, double B, double C, double mu, double sigma2, double e, double f,
                       double a) {
    if (e == 0.0) throw ValidationError("gral_max: payoff loading e must be nonzero");
    if (!(a > 0.0)) throw ValidationError("gral_max: risk aversion must be > 0");
    const auto g = adjusted_gaussian(A, B, C, mu, sigma2);
    const double mean = f + e * g.m;
    const double var = e * e * g.Sigma2;
    GralMaxResult r;
    r.xstar = mean / (a * var);
    r.log_loss = g.log_K - 0.5 * mean * mean / var;
    r.value = -std::exp(r.log_loss);
    return r;
}

double DeltaTable::demand(int age, std::span<const double> recent) const {
    if (age < 0 || age >= q) return 0.0;
    const auto& row = delta_k[static_cast<std::size_t>(age)];
    if (recent.size() < row.size()) throw ValidationError("DeltaTable::demand: too few lags");
    double x = delta[static_cast<std::size_t>(age)];
    for (std::size_t k = 0; k < row.size(); ++k) x += row[k] * recent[k];
    return x;
}

DeltaTable demand_recursion(const EconomyParams& params, const PriceCoefficients& coeffs) {
    params.validate();
    if (coeffs.lags() < 1) throw ValidationError("demand_recursion: price rule needs beta_0");
    const double e = 1.0 + coeffs.beta(0);
    if (e == 0.0) throw ValidationError("beta_0 = -1 leaves demand undefined");

    const int q = params.q;
    const double R = params.R;
    const double s2 = params.sigma * params.sigma;
    const int K = coeffs.lags() - 1;
    const int L = std::max(K + 1, q); // dividend lags carried in the state
    const int n = L + 1;              // state u = (1, d_t, ..., d_{t-L+1})

    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(0) = coeffs.alpha * (1.0 - R);
    for (int k = 0; k < L; ++k) c(1 + k) = coeffs.payoff_loading(k, R);

    // Next-period state from this period's: v = S u with the new dividend in
    // slot 1 set to zero and the window shifted back one lag.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    S(0, 0) = 1.0;
    for (int j = 0; j + 1 < L; ++j) S(j + 2, j + 1) = 1.0;

    DeltaTable t;
    t.q = q;
    t.K_lag = K;
    t.delta.assign(static_cast<std::size_t>(q) + 1, 0.0);
    t.delta_k.assign(static_cast<std::size_t>(q) + 1, std::vector<double>(static_cast<std::size_t>(L), 0.0));
    t.s2.assign(static_cast<std::size_t>(q), s2);

    // Log expected loss at the next age is Q(u') = u'^T P u' / 2; zero after exit.
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int age = q - 1; age >= 0; --age) {
        const Eigen::MatrixXd PS = P * S;
        const Eigen::MatrixXd PA = S.transpose() * PS;
        const Eigen::VectorXd b = PS.row(1).transpose();
        double C = 0.5 * P(1, 1);
        if (C < 0.0) {
            if (C < -1e-12 * std::max(1.0, P.cwiseAbs().maxCoeff()))
                throw ConvergenceError("continuation value is not integrable (C < 0) at age " +
                                           std::to_string(age),
                                       0, C);
            C = 0.0;
        }

        Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
        const WeightVector w = compute_weights(params.lambda, age);
        for (int k = 0; k <= age; ++k) mu(1 + k) = w[k];

        const double tilt = 2.0 * C * s2 + 1.0;
        const double Sigma2 = s2 / tilt;
        const Eigen::VectorXd m = Sigma2 * (mu / s2 - b);
        const Eigen::VectorXd mean = c + e * m;
        const double var = e * e * Sigma2;
        const double D = params.gamma * std::pow(R, q - 1 - age);

        const auto a = static_cast<std::size_t>(age);
        t.s2[a] = Sigma2;
        t.delta[a] = mean(0) / (D * var);
        for (int k = 0; k < L; ++k) t.delta_k[a][static_cast<std::size_t>(k)] = mean(1 + k) / (D * var);

        P = PA + mu * mu.transpose() / s2 - m * m.transpose() / Sigma2 + mean * mean.transpose() / var;
        P(0, 0) += std::log(tilt);
    }
    return t;
}

double nonmyopic_demand(const DeltaTable& table, const DividendHistory& history, long birth_time,
                        long now) {
    const long age = now - birth_time;
    if (age < 0 || age >= table.q) return 0.0;
    const int width = table.width();
    std::vector<double> recent(static_cast<std::size_t>(width));
    for (int k = 0; k < width; ++k) recent[static_cast<std::size_t>(k)] = history.at(now - k);
    return table.demand(static_cast<int>(age), recent);
}

namespace {

double omega_of(double lambda) { return 1.0 / (1.0 + std::exp2(-lambda)); }

struct Q2Parts {
    double e, l01, l11, ratio; // ratio = sigma^2 / s^2
};

Q2Parts q2_parts(double R, double om, double b0, double b1) {
    const double e = 1.0 + b0;
    const double l01 = e * om + b1 - R * b0;
    const double l11 = e * (1.0 - om) - R * b1;
    return {e, l01, l11, (l01 * l01 + e * e) / (e * e)};
}

std::array<double, 2> q2_slope_conditions(double R, double om, double b0, double b1) {
    const auto p = q2_parts(R, om, b0, b1);
    return {p.l01 + p.ratio * (b1 - R * b0) / R + p.e * (1.0 - p.l11 * p.l01 / (p.e * p.e)) / R,
            p.l11 - p.ratio * b1};
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Damped Newton with a central-difference Jacobian. Halves the step while the
// residual grows. Once under tolerance, up to two more full steps are taken
// while they keep reducing the residual.
SolverReport damped_newton(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                           Eigen::VectorXd& x, const SolverOptions& opts, const char* what) {
    Eigen::VectorXd r = F(x);
    double norm = inf_norm(r);
    const auto n = x.size();
    int polished = 0; // full steps taken after reaching the tolerance
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (!std::isfinite(norm)) break;
        if (norm < opts.tolerance && polished >= 2) return {it, norm};
        if (norm < opts.tolerance) ++polished;
        Eigen::MatrixXd J(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double h = 1e-7 * std::max(1.0, std::abs(x(i)));
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            J.col(i) = (F(xp) - F(xm)) / (2.0 * h);
        }
        const Eigen::VectorXd dx = J.fullPivLu().solve(-r);
        double step = 1.0;
        Eigen::VectorXd xn = x + dx;
        Eigen::VectorXd rn = F(xn);
        if (polished > 0 && !(inf_norm(rn) < norm)) return {it + 1, norm};
        for (int halvings = 0; halvings < 40 && !(inf_norm(rn) <= norm); ++halvings) {
            step *= 0.5;
            xn = x + step * dx;
            rn = F(xn);
        }
        x = xn;
        r = rn;
        norm = inf_norm(r);
    }
    if (norm < opts.tolerance) return {opts.max_iterations, norm};
    throw ConvergenceError(std::string(what) + " did not converge", opts.max_iterations, norm);
}

} // namespace

std::array<double, 3> q2_conditions(const EconomyParams& params, double alpha, double beta0,
                                    double beta1) {
    const double R = params.R;
    const auto p = q2_parts(R, omega_of(params.lambda), beta0, beta1);
    const double G = params.gamma * p.e * p.e * params.sigma * params.sigma;
    const auto s = q2_slope_conditions(R, omega_of(params.lambda), beta0, beta1);
    return {alpha * (1.0 - R) * (R + p.ratio - p.l01 / p.e) - 2.0 * R * G, s[0], s[1]};
}

NonMyopicQ2Solution solve_nonmyopic_q2(const EconomyParams& params, const SolverOptions& opts) {
    params.validate();
    if (params.q != 2) throw ValidationError("solve_nonmyopic_q2 requires q = 2");
    if (params.gamma < 1e-6) throw ValidationError("gamma below 1e-6 is not supported");
    const double R = params.R;
    const double om = omega_of(params.lambda);

    const PriceCoefficients start = toy_prices_q2(params);
    Eigen::VectorXd x(2);
    x << start.betas[0], start.betas[1];
    auto F = [&](const Eigen::VectorXd& v) {
        const auto s = q2_slope_conditions(R, om, v(0), v(1));
        return Eigen::VectorXd{{s[0], s[1]}};
    };
    const SolverReport rep = damped_newton(F, x, opts, "two-cohort non-myopic solver");

    NonMyopicQ2Solution sol;
    sol.beta0 = x(0);
    sol.beta1 = x(1);
    const auto p = q2_parts(R, om, sol.beta0, sol.beta1);
    const double G = params.gamma * p.e * p.e * params.sigma * params.sigma;
    sol.alpha = 2.0 * R * G / ((1.0 - R) * (R + p.ratio - p.l01 / p.e));
    sol.s2 = params.sigma * params.sigma / p.ratio;
    sol.l01 = p.l01;
    sol.l11 = p.l11;
    // l(0,1) tends to zero as the two cohorts' beliefs coincide; only a
    // clearly positive value marks the wrong root.
    if (!(sol.l01 < 1e-12 * (1.0 + std::abs(sol.beta0))))
        throw ConvergenceError("two-cohort solver reached the root with l(0,1) > 0", rep.iterations,
                               rep.residual);

    const auto c = q2_conditions(params, sol.alpha, sol.beta0, sol.beta1);
    // Condition 1 is scaled by alpha; report it relative to 2 R G.
    sol.solver = {rep.iterations,
                  std::max({std::abs(c[0]) / (2.0 * R * G), std::abs(c[1]), std::abs(c[2])})};
    return sol;
}

Q2DemandCoefficients q2_demand_coefficients(const EconomyParams& params, const NonMyopicQ2Solution& sol) {
    const double R = params.R;
    const double s2 = params.sigma * params.sigma;
    const double e = 1.0 + sol.beta0;
    const double G = params.gamma * e * e * s2;
    const double ratio = sol.s2 / s2; // s^2 / sigma^2
    const double Dy = params.gamma * R * e * e * sol.s2;
    const double a0 = sol.alpha * (1.0 - R);
    Q2DemandCoefficients d;
    d.young = {a0 * (1.0 - ratio * sol.l01 / e) / Dy,
               (sol.beta1 - R * sol.beta0 + e * ratio * (1.0 - sol.l11 * sol.l01 / (e * e))) / Dy,
               -R * sol.beta1 / Dy};
    d.old = {a0 / G, sol.l01 / G, sol.l11 / G};
    return d;
}

std::vector<double> clearing_residuals(const EconomyParams& params, const PriceCoefficients& coeffs) {
    const DeltaTable t = demand_recursion(params, coeffs);
    const double e = 1.0 + coeffs.beta(0);
    const double G = params.gamma * e * e * params.sigma * params.sigma;
    std::vector<double> r(static_cast<std::size_t>(t.width()) + 1, 0.0);
    for (int age = 0; age < t.q; ++age) {
        const auto a = static_cast<std::size_t>(age);
        r[0] += t.delta[a];
        for (std::size_t k = 0; k < t.delta_k[a].size(); ++k) r[k + 1] += t.delta_k[a][k];
    }
    r[0] -= t.q;
    for (double& v : r) v *= G;
    return r;
}

NonMyopicSolution solve_nonmyopic_general(const EconomyParams& params, const SolverOptions& opts) {
    params.validate();
    if (params.q < 2 || params.q > 15) throw ValidationError("non-myopic solver supports 2 <= q <= 15");
    if (params.gamma < 1e-6) throw ValidationError("gamma below 1e-6 is not supported");
    const int q = params.q;

    const PriceCoefficients start = solve_myopic_prices(params);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(start.betas.data(), q);

    // The loading conditions do not involve alpha.
    auto F = [&](const Eigen::VectorXd& v) {
        const PriceCoefficients c{0.0, std::vector<double>(v.data(), v.data() + q)};
        const auto r = clearing_residuals(params, c);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(r.data() + 1, q));
    };
    SolverReport rep = damped_newton(F, x, opts, "non-myopic solver");

    NonMyopicSolution sol;
    sol.coeffs.betas.assign(x.data(), x.data() + q);
    // The constant condition is affine in alpha.
    sol.coeffs.alpha = 0.0;
    const double f0 = clearing_residuals(params, sol.coeffs)[0];
    sol.coeffs.alpha = start.alpha;
    const double f1 = clearing_residuals(params, sol.coeffs)[0];
    sol.coeffs.alpha = -f0 * start.alpha / (f1 - f0);

    const auto r = clearing_residuals(params, sol.coeffs);
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, std::abs(v));
    rep.residual = worst;
    if (!(worst < 1e-9)) throw ConvergenceError("non-myopic solver left residual", rep.iterations, worst);
    sol.table = demand_recursion(params, sol.coeffs);
    sol.solver = rep;
    return sol;
}

SensitivityDecomposition decompose_sensitivity(const NonMyopicQ2Solution& sol, const EconomyParams& params) {
    const double R = params.R;
    const double om = omega_of(params.lambda);
    const double e = 1.0 + sol.beta0;
    const double s2 = params.sigma * params.sigma;
    const double G = params.gamma * e * e * s2;
    SensitivityDecomposition d;
    d.beliefs_term = e * (1.0 - om) / G;
    d.discount_term = -((1.0 + sol.beta0 + sol.beta1 - R * sol.beta0) / G) * ((R - 1.0) / R);
    d.dynamic_term = (sol.beta1 - R * sol.beta0) / G / R * (s2 / sol.s2 - 1.0) -
                     e * sol.l11 * sol.l01 / (e * e * R * G);
    const auto dc = q2_demand_coefficients(params, sol);
    d.total = dc.young[1] - dc.old[1];
    return d;
}

} // namespace ebl

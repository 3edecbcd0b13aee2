#include "ebl/simulator.hpp"

#include "ebl/error.hpp"
#include "ebl/nonmyopic.hpp"
#include "ebl/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace ebl {

std::string_view to_string(Regime r) {
    return r == Regime::kMyopic ? "myopic" : "nonmyopic_q2";
}

Regime parse_regime(std::string_view s) {
    if (s == "myopic") return Regime::kMyopic;
    if (s == "nonmyopic_q2") return Regime::kNonMyopicQ2;
    throw ValidationError("unknown regime '" + std::string(s) + "' (expected myopic or nonmyopic_q2)");
}

void SimConfig::validate() const {
    params.validate(true);
    if (T < 1) throw ValidationError("T must be >= 1");
    if (burn_in < params.q) throw ValidationError("burn_in must be >= q");
    if (regime == Regime::kNonMyopicQ2 && params.q != 2)
        throw ValidationError("the nonmyopic_q2 regime requires q = 2");
}

DemandProfile SimPath::demand_profile(long t) const {
    DemandProfile d;
    d.time = t;
    for (int age = 0; age < params.q; ++age) d.holdings[t - age] = holding(t, age);
    return d;
}

PriceCoefficients solve_regime(const SimConfig& config) {
    config.validate();
    EconomyParams unit = config.params;
    unit.sigma = 1.0;
    PriceCoefficients c = config.regime == Regime::kMyopic ? solve_myopic_prices(unit)
                                                           : solve_nonmyopic_q2(unit).coeffs();
    c.alpha *= config.params.sigma * config.params.sigma;
    return c;
}

namespace {

// Demand of each age as an affine function of the dividend window.
struct DemandRule {
    std::vector<double> constant;            // per age
    std::vector<std::vector<double>> slope; // per age, per lag
    int width = 0;
};

DemandRule myopic_rule(const EconomyParams& p, const PriceCoefficients& c) {
    const double e = 1.0 + c.beta(0);
    const double G = p.gamma * e * e * p.sigma * p.sigma;
    DemandRule r;
    r.width = std::max(p.q, c.lags());
    for (int age = 0; age < p.q; ++age) {
        const WeightVector w = compute_weights(p.lambda, age);
        std::vector<double> s(static_cast<std::size_t>(r.width));
        for (int k = 0; k < r.width; ++k)
            s[static_cast<std::size_t>(k)] = ((k <= age ? e * w[k] : 0.0) + c.payoff_loading(k, p.R)) / G;
        r.slope.push_back(std::move(s));
        r.constant.push_back(c.alpha * (1.0 - p.R) / G);
    }
    return r;
}

DemandRule nonmyopic_rule(const EconomyParams& p, const PriceCoefficients& c) {
    const DeltaTable t = demand_recursion(p, c);
    DemandRule r;
    r.width = t.width();
    for (int age = 0; age < p.q; ++age) {
        r.constant.push_back(t.delta[static_cast<std::size_t>(age)]);
        r.slope.push_back(t.delta_k[static_cast<std::size_t>(age)]);
    }
    return r;
}

double tv_from_holdings(const std::vector<double>& now, const std::vector<double>& prev, int q,
                        TurnoverConvention conv) {
    // now[age] = x_t of the cohort aged `age` at t; prev likewise at t-1.
    double ss = 0.0;
    for (int age = 1; age < q; ++age) {
        const double dx = now[static_cast<std::size_t>(age)] - prev[static_cast<std::size_t>(age) - 1];
        ss += dx * dx;
    }
    const double newborn = now[0];
    const double exiter = prev[static_cast<std::size_t>(q) - 1];
    switch (conv) {
    case TurnoverConvention::kEntryExit: ss += newborn * newborn + exiter * exiter; break;
    case TurnoverConvention::kReplacement: ss += (newborn - exiter) * (newborn - exiter); break;
    case TurnoverConvention::kInterior: break;
    }
    return std::sqrt(ss / q);
}

} // namespace

SimPath simulate(const SimConfig& config, const PriceCoefficients& coeffs) {
    config.validate();
    const EconomyParams& p = config.params;
    const int q = p.q;
    if (coeffs.lags() != q)
        throw ValidationError("price rule has " + std::to_string(coeffs.lags()) + " loadings; q = " +
                              std::to_string(q) + " requires a solved rule");

    PhiloxStream rng(config.seed, config.path_index);
    std::vector<double> draws(static_cast<std::size_t>(config.burn_in + config.T));
    for (double& d : draws) d = p.theta + p.sigma * rng.normal();

    SimPath path;
    path.params = p;
    path.coeffs = coeffs;
    path.history = DividendHistory(-config.burn_in, draws);

    const bool deterministic = p.sigma == 0.0;
    DemandRule rule;
    if (!deterministic)
        rule = config.regime == Regime::kMyopic ? myopic_rule(p, coeffs) : nonmyopic_rule(p, coeffs);

    auto d_at = [&](long t) { return draws[static_cast<std::size_t>(t + config.burn_in)]; };
    auto price = [&](long t) {
        double v = coeffs.alpha;
        for (int k = 0; k < q; ++k) v += coeffs.betas[static_cast<std::size_t>(k)] * d_at(t - k);
        return v;
    };
    auto fill_holdings = [&](long t, std::vector<double>& x) {
        for (int age = 0; age < q; ++age) {
            const auto a = static_cast<std::size_t>(age);
            if (deterministic) {
                // Every cohort holds the same belief, so each holds the per-capita supply.
                x[a] = 1.0;
                continue;
            }
            double v = rule.constant[a];
            for (int k = 0; k < rule.width; ++k) v += rule.slope[a][static_cast<std::size_t>(k)] * d_at(t - k);
            x[a] = v;
        }
    };

    const auto T = static_cast<std::size_t>(config.T);
    path.dividends.resize(T);
    path.prices.resize(T);
    path.excess_returns.resize(T);
    path.tv.resize(T);
    path.holdings.resize(T * static_cast<std::size_t>(q));

    std::vector<double> prev(static_cast<std::size_t>(q)), now(static_cast<std::size_t>(q));
    fill_holdings(-1, prev);
    double p_prev = price(-1);
    for (long t = 0; t < config.T; ++t) {
        const auto i = static_cast<std::size_t>(t);
        const double d = d_at(t);
        const double pt = price(t);
        fill_holdings(t, now);
        path.dividends[i] = d;
        path.prices[i] = pt;
        path.excess_returns[i] = pt + d - p.R * p_prev;
        path.tv[i] = tv_from_holdings(now, prev, q, config.convention);
        double mean = 0.0;
        for (int age = 0; age < q; ++age) {
            path.holdings[i * static_cast<std::size_t>(q) + static_cast<std::size_t>(age)] =
                now[static_cast<std::size_t>(age)];
            mean += now[static_cast<std::size_t>(age)];
        }
        path.max_clearing_residual = std::max(path.max_clearing_residual, std::abs(mean / q - 1.0));
        std::swap(prev, now);
        p_prev = pt;
    }
    return path;
}

SimPath simulate(const SimConfig& config) { return simulate(config, solve_regime(config)); }

std::vector<SimPath> simulate_batch(const SimConfig& config, const PriceCoefficients& coeffs, int n_paths) {
    if (n_paths < 0) throw ValidationError("n_paths must be >= 0");
    config.validate();
    std::vector<SimPath> out(static_cast<std::size_t>(n_paths));
    std::vector<std::string> errors(static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_paths; ++i) {
        SimConfig c = config;
        c.path_index = config.path_index + static_cast<std::uint64_t>(i);
        try {
            out[static_cast<std::size_t>(i)] = simulate(c, coeffs);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw ValidationError(e);
    return out;
}

std::vector<SimPath> simulate_batch_serial(const SimConfig& config, const PriceCoefficients& coeffs,
                                           int n_paths) {
    if (n_paths < 0) throw ValidationError("n_paths must be >= 0");
    std::vector<SimPath> out;
    out.reserve(static_cast<std::size_t>(n_paths));
    for (int i = 0; i < n_paths; ++i) {
        SimConfig c = config;
        c.path_index = config.path_index + static_cast<std::uint64_t>(i);
        out.push_back(simulate(c, coeffs));
    }
    return out;
}

SampleMoments estimate_moments(const SimPath& path, int max_lag) {
    if (max_lag < 0) throw ValidationError("max_lag must be >= 0");
    const long n = path.length();
    if (n < 10 * std::max(max_lag, 1))
        throw ValidationError("path too short: need T >= 10 * max_lag");
    const auto& p = path.prices;

    SampleMoments m;
    m.n_obs = n;
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= static_cast<double>(n);
    m.mean = mean;
    m.bandwidth = std::max(static_cast<int>(std::floor(4.0 * std::pow(n / 100.0, 2.0 / 9.0))),
                           2 * (max_lag + path.params.q));
    m.bandwidth = static_cast<int>(std::min<long>(m.bandwidth, n / 4));

    // Each moment is the mean of z_t = (p_t - mean)(p_{t+j} - mean); its
    // standard error uses the Bartlett long-run variance of z.
    auto moment = [&](int j, double& est, double& se) {
        const long len = n - j;
        std::vector<double> z(static_cast<std::size_t>(len));
        double zbar = 0.0;
        for (long t = 0; t < len; ++t) {
            const auto i = static_cast<std::size_t>(t);
            z[i] = (p[i] - mean) * (p[i + static_cast<std::size_t>(j)] - mean);
            zbar += z[i];
        }
        zbar /= static_cast<double>(len);
        est = zbar;
        auto acov = [&](int h) {
            double s = 0.0;
            for (long t = h; t < len; ++t)
                s += (z[static_cast<std::size_t>(t)] - zbar) * (z[static_cast<std::size_t>(t - h)] - zbar);
            return s / static_cast<double>(len);
        };
        double lrv = acov(0);
        for (int h = 1; h <= m.bandwidth; ++h) lrv += 2.0 * (1.0 - h / (m.bandwidth + 1.0)) * acov(h);
        se = std::sqrt(std::max(lrv, 0.0) / static_cast<double>(len));
    };

    moment(0, m.moments.variance, m.variance_se);
    for (int j = 1; j <= max_lag; ++j) {
        double est = 0.0, se = 0.0;
        moment(j, est, se);
        m.moments.autocov.push_back(est);
        m.moments.autocorr.push_back(m.moments.variance > 0.0 ? est / m.moments.variance : 0.0);
        m.autocov_se.push_back(se);
    }
    return m;
}

RegressionResult predictability_regression(const SimPath& path, int lags) {
    const int q = path.params.q;
    if (lags < q) throw ValidationError("predictability regression needs lags >= q");
    const long T = path.length();
    const long first_hist = path.history.origin_time();
    // Rows t with d_{t-lags+1} recorded and p_{t+1} simulated.
    const long t0 = std::max(0L, first_hist + lags - 1);
    const long n = T - 1 - t0;
    if (n < 10L * (lags + 1)) throw ValidationError("path too short for the regression");

    Eigen::MatrixXd X(n, lags + 1);
    Eigen::VectorXd y(n);
    for (long r = 0; r < n; ++r) {
        const long t = t0 + r;
        const auto i = static_cast<std::size_t>(t);
        if (path.prices[i] == 0.0) throw ValidationError("zero price: gross return undefined");
        y(r) = (path.prices[i + 1] + path.dividends[i + 1]) / path.prices[i] - path.params.R;
        X(r, 0) = 1.0;
        for (int k = 0; k < lags; ++k) X(r, k + 1) = path.history.at(t - k);
    }
    // Near-constant dividends make the lags collinear with the intercept and
    // the fit a deterministic artifact.
    for (int k = 1; k <= lags; ++k) {
        const double mean = X.col(k).mean();
        const double sd = std::sqrt((X.col(k).array() - mean).square().mean());
        if (!(sd > 1e-8 * std::max(1.0, std::abs(mean))))
            throw ValidationError("dividends are (nearly) constant: regressors are collinear");
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) throw ValidationError("regressors are collinear");
    const Eigen::VectorXd b = qr.solve(y);
    const Eigen::VectorXd e = y - X * b;

    // HC0 covariance: (X'X)^-1 X' diag(e^2) X (X'X)^-1 = P R^-1 (Q' diag(e^2) Q) R^-T P'.
    const auto k = X.cols();
    const Eigen::MatrixXd Rm = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv = Rm.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd Q = (X * qr.colsPermutation()) * Rinv;
    const Eigen::MatrixXd Qe = Q.array().colwise() * e.array();
    const Eigen::MatrixXd meat = Qe.transpose() * Qe;
    const Eigen::MatrixXd cov_perm = Rinv * meat * Rinv.transpose();
    const Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();

    RegressionResult res;
    res.n_obs = n;
    for (Eigen::Index i = 0; i < k; ++i) {
        res.coefficients.push_back(b(i));
        res.standard_errors.push_back(std::sqrt(cov(i, i)));
    }
    const double ybar = y.mean();
    const double tss = (y.array() - ybar).square().sum();
    res.r_squared = tss > 0.0 ? 1.0 - e.squaredNorm() / tss : 0.0;
    return res;
}

} // namespace ebl

// ebl: command-line front end. Every subcommand prints a JSON summary on
// stdout and writes its tables to the output directory.
//
// Exit codes: 0 ok, 1 invalid input, 2 solver did not converge, 3 I/O
// failure, 4 `check` found a failing property.

#include "ebl/acceptance.hpp"
#include "ebl/demographics.hpp"
#include "ebl/equilibrium.hpp"
#include "ebl/error.hpp"
#include "ebl/io.hpp"
#include "ebl/measures.hpp"
#include "ebl/nonmyopic.hpp"
#include "ebl/simulator.hpp"
#include "ebl/trade_volume.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace ebl;

namespace {

enum ExitCode { kOk = 0, kInvalid = 1, kNoConvergence = 2, kIo = 3, kCheckFailed = 4 };

// A table that serializes as CSV or as a JSON array of row objects.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> text_column; // optional trailing string column
    std::string text_name;

    std::string csv() const {
        auto h = header;
        if (!text_name.empty()) h.push_back(text_name);
        CsvWriter w(h);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::vector<std::string> cells;
            for (double v : rows[i]) cells.push_back(format_double(v));
            if (!text_name.empty()) cells.push_back(text_column[i]);
            w.row(cells);
        }
        return w.str();
    }

    json as_json() const {
        json arr = json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            json o = json::object();
            for (std::size_t c = 0; c < header.size(); ++c) o[header[c]] = number(rows[i][c]);
            if (!text_name.empty()) o[text_name] = text_column[i];
            arr.push_back(o);
        }
        return arr;
    }

    // JSON has no NaN; undefined cells become null.
    static json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
};

struct Options {
    std::string config_path;
    std::string output_dir;
    std::string format;
    std::optional<int> q;
    std::optional<double> R, gamma, sigma, theta, lambda;

    // simulate / trade-volume
    std::optional<std::uint64_t> seed;
    std::optional<long> T, burn_in;
    std::optional<std::uint64_t> path_index;
    std::optional<int> paths, max_lag, regression_lags;
    std::string regime, convention, coefficients;

    // demographics / growth
    std::optional<long> tau;
    std::optional<double> y, y_tau, sweep_min, sweep_max, y0;
    std::optional<int> sweep_points, window;
    std::vector<double> g_values;

    // measures
    std::string returns, population, turnover, cpi;
    std::optional<long> first_birth, last_birth;
    std::optional<int> max_age, old_min_age, young_max_age, ma_lags;
};

// Values after merging defaults, the config file and flags (flags win).
struct Run {
    EconomyParams params;
    fs::path output_dir = ".";
    std::string format = "csv";
    json sim = json::object(), shock = json::object(), growth = json::object(), measures = json::object();
    std::string coefficients;
};

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + "." + key + " has the wrong type");
    }
}

Run load_run(const Options& o) {
    Run run;
    json cfg = json::object();
    if (!o.config_path.empty()) {
        try {
            cfg = json::parse(read_file(o.config_path));
        } catch (const json::parse_error& e) {
            throw ValidationError(o.config_path + ": " + e.what());
        }
        check_keys(cfg, {"params", "output_dir", "format", "simulation", "shock", "growth", "measures", "coefficients"},
                   "config");
    }
    if (cfg.contains("params")) run.params = params_from_json(cfg["params"], run.params);
    if (o.q) run.params.q = *o.q;
    if (o.R) run.params.R = *o.R;
    if (o.gamma) run.params.gamma = *o.gamma;
    if (o.sigma) run.params.sigma = *o.sigma;
    if (o.theta) run.params.theta = *o.theta;
    if (o.lambda) run.params.lambda = *o.lambda;

    if (!o.output_dir.empty())
        run.output_dir = o.output_dir;
    else if (cfg.contains("output_dir"))
        run.output_dir = get_or<std::string>(cfg, "output_dir", ".", "config");
    else if (const char* env = std::getenv("EBL_OUTPUT_DIR"); env && *env)
        run.output_dir = env;

    run.format = o.format.empty() ? get_or<std::string>(cfg, "format", "csv", "config") : o.format;
    if (run.format != "csv" && run.format != "json") throw ValidationError("format must be csv or json");

    run.sim = cfg.value("simulation", json::object());
    check_keys(run.sim,
               {"seed", "T", "burn_in", "regime", "convention", "path_index", "paths", "max_lag", "regression_lags"},
               "simulation");
    run.shock = cfg.value("shock", json::object());
    check_keys(run.shock, {"tau", "y", "y_tau", "sweep_min", "sweep_max", "sweep_points", "window"}, "shock");
    run.growth = cfg.value("growth", json::object());
    check_keys(run.growth, {"g", "y0"}, "growth");
    run.measures = cfg.value("measures", json::object());
    check_keys(run.measures,
               {"returns", "population", "turnover", "cpi", "lambda", "first_birth", "last_birth", "max_age",
                "old_min_age", "young_max_age", "ma_lags"},
               "measures");
    run.coefficients = o.coefficients.empty() ? get_or<std::string>(cfg, "coefficients", "", "config") : o.coefficients;

    if (run.params.lambda < 0.0)
        std::cerr << json{{"warning", "lambda < 0: older observations get more weight; the model's results assume "
                                      "lambda > 0"}}
                         .dump()
                  << "\n";
    return run;
}

struct Outputs {
    const Run& run;
    json files = json::array();

    void table(const std::string& stem, const Table& t) {
        const fs::path p = run.output_dir / (stem + (run.format == "csv" ? ".csv" : ".json"));
        write_atomic(p, run.format == "csv" ? t.csv() : t.as_json().dump(2) + "\n");
        files.push_back(p.string());
    }
    void document(const std::string& stem, const json& j) {
        const fs::path p = run.output_dir / (stem + ".json");
        write_atomic(p, j.dump(2) + "\n");
        files.push_back(p.string());
    }
};

json solution_json(const EconomyParams& p, const PriceCoefficients& c) {
    json j = params_to_json(p);
    j.update(coeffs_to_json(c));
    return j;
}

// ---- solve-myopic, solve-nonmyopic, benchmark ----

json cmd_solve_myopic(const Run& run, Outputs& out) {
    run.params.validate();
    const auto c = solve_myopic_prices(run.params);
    const auto m = price_moments(c, run.params.sigma, run.params.q);
    json j = solution_json(run.params, c);
    j["price_variance"] = m.variance;
    j["price_autocov"] = m.autocov;
    j["price_autocorr"] = m.autocorr;
    j["average_weights"] = average_weights(run.params).w;
    out.document("solution", j);
    return j;
}

json cmd_solve_nonmyopic(const Run& run, Outputs& out) {
    run.params.validate();
    json j;
    DeltaTable table;
    if (run.params.q == 2) {
        const auto s = solve_nonmyopic_q2(run.params);
        j = solution_json(run.params, s.coeffs());
        j["young_adjusted_variance"] = s.s2;
        j["l01"] = s.l01;
        j["l11"] = s.l11;
        j["iterations"] = s.solver.iterations;
        j["residual"] = s.solver.residual;
        table = demand_recursion(run.params, s.coeffs());
    } else {
        const auto s = solve_nonmyopic_general(run.params);
        j = solution_json(run.params, s.coeffs);
        j["iterations"] = s.solver.iterations;
        j["residual"] = s.solver.residual;
        table = s.table;
    }
    j["myopic_betas"] = solve_myopic_prices(run.params).betas;
    out.document("solution", j);

    Table t;
    t.header = {"age", "delta", "adjusted_variance"};
    for (int k = 0; k < table.width(); ++k) t.header.push_back("delta_lag" + std::to_string(k));
    for (int age = 0; age < table.q; ++age) {
        std::vector<double> row{double(age), table.delta[age], table.s2[age]};
        for (double v : table.delta_k[age]) row.push_back(v);
        t.rows.push_back(row);
    }
    out.table("demand_table", t);
    return j;
}

json cmd_benchmark(const Run& run, Outputs& out) {
    run.params.validate();
    const auto b = benchmark_known_mean(run.params);
    json j = params_to_json(run.params);
    j["price"] = b.price;
    j["holding"] = b.holding;
    out.document("benchmark", j);
    return j;
}

// ---- simulate, trade-volume ----

SimConfig sim_config(const Run& run, const Options& o) {
    const json& s = run.sim;
    SimConfig c;
    c.params = run.params;
    c.seed = o.seed ? *o.seed : get_or<std::uint64_t>(s, "seed", 0, "simulation");
    c.T = o.T ? *o.T : get_or<long>(s, "T", 1000, "simulation");
    c.burn_in = o.burn_in ? *o.burn_in : get_or<long>(s, "burn_in", c.params.q, "simulation");
    c.path_index = o.path_index ? *o.path_index : get_or<std::uint64_t>(s, "path_index", 0, "simulation");
    c.regime = parse_regime(o.regime.empty() ? get_or<std::string>(s, "regime", "myopic", "simulation") : o.regime);
    c.convention = parse_turnover_convention(
        o.convention.empty() ? get_or<std::string>(s, "convention", "interior", "simulation") : o.convention);
    c.validate();
    return c;
}

PriceCoefficients sim_coeffs(const Run& run, const SimConfig& c) {
    if (run.coefficients.empty()) return solve_regime(c);
    json j;
    try {
        j = json::parse(read_file(run.coefficients));
    } catch (const json::parse_error& e) {
        throw ValidationError(run.coefficients + ": " + e.what());
    }
    return coeffs_from_json(j);
}

Table path_table(const SimPath& p) {
    Table t;
    t.header = {"time", "dividend", "price", "excess_return", "tv"};
    for (int age = 0; age < p.params.q; ++age) t.header.push_back("holding_age" + std::to_string(age));
    for (long i = 0; i < p.length(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        std::vector<double> row{double(i), p.dividends[k], p.prices[k], p.excess_returns[k], p.tv[k]};
        for (int age = 0; age < p.params.q; ++age) row.push_back(p.holding(i, age));
        t.rows.push_back(row);
    }
    return t;
}

json path_report(const SimPath& p, int max_lag, int reg_lags) {
    json j;
    j["max_clearing_residual"] = p.max_clearing_residual;
    const long n = p.length();
    if (n >= 10L * std::max(max_lag, 1) && p.params.sigma > 0.0) {
        const auto m = estimate_moments(p, max_lag);
        const auto exact = price_moments(p.coeffs, p.params.sigma, max_lag);
        j["moments"] = {{"mean", m.mean},
                        {"variance", m.moments.variance},
                        {"variance_se", m.variance_se},
                        {"autocov", m.moments.autocov},
                        {"autocov_se", m.autocov_se},
                        {"bandwidth", m.bandwidth},
                        {"n_obs", m.n_obs},
                        {"population_variance", exact.variance},
                        {"population_autocov", exact.autocov}};
    } else {
        j["moments"] = {{"skipped", "needs sigma > 0 and T >= 10 * max_lag"}};
    }
    try {
        const auto r = predictability_regression(p, reg_lags);
        std::vector<double> t;
        for (std::size_t i = 0; i < r.coefficients.size(); ++i) t.push_back(r.t_stat(i));
        j["predictability"] = {{"lags", reg_lags},
                               {"coefficients", r.coefficients},
                               {"standard_errors", r.standard_errors},
                               {"t_stats", t},
                               {"r_squared", r.r_squared},
                               {"n_obs", r.n_obs}};
    } catch (const ValidationError& e) {
        j["predictability"] = {{"skipped", e.what()}};
    }
    return j;
}

json cmd_simulate(const Run& run, const Options& o, Outputs& out) {
    const SimConfig c = sim_config(run, o);
    const auto coeffs = sim_coeffs(run, c);
    const int paths = o.paths ? *o.paths : get_or<int>(run.sim, "paths", 1, "simulation");
    const int max_lag = o.max_lag ? *o.max_lag : get_or<int>(run.sim, "max_lag", c.params.q, "simulation");
    const int reg_lags =
        o.regression_lags ? *o.regression_lags : get_or<int>(run.sim, "regression_lags", c.params.q + 2, "simulation");
    if (paths < 1) throw ValidationError("paths must be >= 1");

    const auto batch = simulate_batch(c, coeffs, paths);
    json reports = json::array();
    for (std::size_t i = 0; i < batch.size(); ++i) {
        out.table(paths == 1 ? "path" : "path_" + std::to_string(c.path_index + i), path_table(batch[i]));
        json r = path_report(batch[i], max_lag, reg_lags);
        r["path_index"] = c.path_index + i;
        reports.push_back(r);
    }
    json j = solution_json(c.params, coeffs);
    j["regime"] = std::string(to_string(c.regime));
    out.document("coefficients", j);

    json summary = {{"seed", c.seed},         {"T", c.T},
                    {"burn_in", c.burn_in},   {"regime", std::string(to_string(c.regime))},
                    {"convention", std::string(to_string(c.convention))},
                    {"solution", j},          {"paths", reports}};
    out.document("moments", summary);
    return summary;
}

json cmd_trade_volume(const Run& run, const Options& o, Outputs& out) {
    SimConfig c = sim_config(run, o);
    if (c.regime != Regime::kMyopic) throw ValidationError("trade-volume uses the myopic regime");
    const auto coeffs = sim_coeffs(run, c);
    const SimPath p = simulate(c, coeffs);

    const TurnoverConvention all[] = {TurnoverConvention::kEntryExit, TurnoverConvention::kReplacement,
                                      TurnoverConvention::kInterior};
    Table t;
    t.header = {"time", "dividend", "tv"};
    t.text_name = "convention";
    double worst = 0.0;
    for (const auto conv : all) {
        const auto series = trade_volume_series(c.params, coeffs, p.history, 0, c.T - 1, conv);
        for (const auto& pt : series) {
            t.rows.push_back({double(pt.time), p.history.at(pt.time), pt.tv});
            t.text_column.emplace_back(to_string(conv));
            if (conv == TurnoverConvention::kEntryExit)
                worst = std::max(worst, std::abs(pt.tv - trade_volume_beliefs(c.params, coeffs, p.history, pt.time)));
        }
    }
    out.table("tv", t);
    return {{"seed", c.seed}, {"T", c.T}, {"max_definition_vs_belief_gap", worst}, {"solution", solution_json(c.params, coeffs)}};
}

// ---- demographics, growth ----

json cmd_demographics(const Run& run, const Options& o, Outputs& out) {
    EconomyParams p = run.params;
    p.validate();
    const json& s = run.shock;
    DemographicShock shock;
    shock.tau = o.tau ? *o.tau : get_or<long>(s, "tau", 0, "shock");
    shock.y = o.y ? *o.y : get_or<double>(s, "y", 0.5, "shock");
    shock.y_tau = o.y_tau ? *o.y_tau : get_or<double>(s, "y_tau", 0.6, "shock");
    shock.validate();
    const double lo = o.sweep_min ? *o.sweep_min : get_or<double>(s, "sweep_min", 0.1, "shock");
    const double hi = o.sweep_max ? *o.sweep_max : get_or<double>(s, "sweep_max", 1.0, "shock");
    const int n = o.sweep_points ? *o.sweep_points : get_or<int>(s, "sweep_points", 19, "shock");
    const int window = o.window ? *o.window : get_or<int>(s, "window", 5, "shock");
    if (n < 2 || !(hi > lo) || lo <= 0.0) throw ValidationError("sweep needs 0 < sweep_min < sweep_max and >= 2 points");
    if (window < 1) throw ValidationError("window must be >= 1");

    Table sweep;
    sweep.header = {"y_tau", "a_tau", "b0_tau", "b1_tau", "a_tau1", "b0_tau1", "b1_tau1"};
    for (int i = 0; i < n; ++i) {
        DemographicShock si = shock;
        si.y_tau = lo + (hi - lo) * i / (n - 1);
        const auto sp = solve_shock_pricing(p, si);
        sweep.rows.push_back({si.y_tau, sp.a_tau, sp.b0_tau, sp.b1_tau, sp.a_tau1, sp.b0_tau1, sp.b1_tau1});
    }
    out.table("demographics_sweep", sweep);

    // Constant dividends at theta: the path isolates the price effect of the cohort-size shock.
    const long first = shock.tau - window - 1;
    const DividendHistory h(first, std::vector<double>(static_cast<std::size_t>(2 * window + 3), p.theta));
    const auto path = shock_price_path(p, shock, h);
    Table resp;
    resp.header = {"time", "dividend", "price", "excess_return"};
    for (std::size_t i = 0; i < path.times.size(); ++i)
        resp.rows.push_back({double(path.times[i]), p.theta, path.prices[i], path.excess_returns[i]});
    out.table("shock_path", resp);

    const auto sp = solve_shock_pricing(p, shock);
    return {{"tau", shock.tau},
            {"y", shock.y},
            {"y_tau", shock.y_tau},
            {"a_tau", sp.a_tau},
            {"b0_tau", sp.b0_tau},
            {"b1_tau", sp.b1_tau},
            {"a_tau1", sp.a_tau1},
            {"b0_tau1", sp.b0_tau1},
            {"b1_tau1", sp.b1_tau1},
            {"baseline", coeffs_to_json(sp.baseline)}};
}

json cmd_growth(const Run& run, const Options& o, Outputs& out) {
    run.params.validate();
    std::vector<double> gs = o.g_values;
    if (gs.empty()) gs = get_or<std::vector<double>>(run.growth, "g", {0.0, 0.01, 0.02, 0.05, 0.1}, "growth");
    const double y0 = o.y0 ? *o.y0 : get_or<double>(run.growth, "y0", 0.5, "growth");
    Table t;
    t.header = {"g", "alpha0", "beta0", "beta1", "beta0_share"};
    json rows = json::array();
    for (double g : gs) {
        const auto gp = solve_growth_pricing(run.params, {g, y0});
        t.rows.push_back({g, gp.alpha0, gp.beta0, gp.beta1, gp.beta0 / (gp.beta0 + gp.beta1)});
        rows.push_back({{"g", g}, {"alpha0", gp.alpha0}, {"beta0", gp.beta0}, {"beta1", gp.beta1}});
    }
    out.table("growth_sweep", t);
    return {{"y0", y0}, {"rows", rows}};
}

// ---- measures ----

json cmd_measures(const Run& run, const Options& o, Outputs& out) {
    const json& m = run.measures;
    const auto pick = [&](const std::string& flag, const char* key) {
        return flag.empty() ? get_or<std::string>(m, key, "", "measures") : flag;
    };
    const std::string returns_path = pick(o.returns, "returns");
    if (returns_path.empty()) throw ValidationError("measures needs --returns (year,return CSV)");
    const std::string pop_path = pick(o.population, "population");
    const std::string turnover_path = pick(o.turnover, "turnover");
    const std::string cpi_path = pick(o.cpi, "cpi");
    const double lambda = o.lambda ? *o.lambda : get_or<double>(m, "lambda", 1.0, "measures");
    const int max_age = o.max_age ? *o.max_age : get_or<int>(m, "max_age", 74, "measures");
    const int old_min = o.old_min_age ? *o.old_min_age : get_or<int>(m, "old_min_age", 60, "measures");
    const int young_max = o.young_max_age ? *o.young_max_age : get_or<int>(m, "young_max_age", 39, "measures");
    const int ma = o.ma_lags ? *o.ma_lags : get_or<int>(m, "ma_lags", 4, "measures");

    YearSeries r = read_year_series(returns_path, "return");
    if (!cpi_path.empty()) r = deflate_returns(r, read_year_series(cpi_path, "cpi"));
    const long first_birth = o.first_birth ? *o.first_birth : get_or<long>(m, "first_birth", r.first_year, "measures");
    const long last_birth = o.last_birth ? *o.last_birth : get_or<long>(m, "last_birth", r.last_year(), "measures");
    const auto panel = experienced_returns(r, lambda, first_birth, last_birth, max_age);

    Table pt;
    pt.header = {"year", "birth_year", "experienced_return"};
    for (const auto& [key, v] : panel) pt.rows.push_back({double(key.first), double(key.second), v});
    out.table("experience_panel", pt);
    json summary = {{"lambda", lambda}, {"cohort_years", panel.size()}};

    if (!pop_path.empty()) {
        const auto pop = read_population(pop_path);
        Table gap, dis;
        gap.header = {"year", "old_minus_young"};
        dis.header = {"year", "disagreement_std"};
        for (long y = r.first_year; y <= r.last_year(); ++y) {
            try {
                gap.rows.push_back({double(y), group_gap(panel, pop, y, old_min, young_max)});
            } catch (const ValidationError&) {
                // Years without both age groups are left out of the table.
            }
            try {
                dis.rows.push_back({double(y), disagreement_std(panel, pop, y)});
            } catch (const ValidationError&) {
            }
        }
        out.table("gap", gap);
        out.table("disagreement", dis);
        summary["gap_years"] = gap.rows.size();
        summary["disagreement_years"] = dis.rows.size();
    }
    if (!turnover_path.empty()) {
        const auto d = detrend_turnover(read_year_series(turnover_path, "turnover"));
        const auto smooth = moving_average(d.residuals, ma);
        Table t;
        t.header = {"year", "log_turnover", "detrended", "detrended_ma"};
        for (long y = d.residuals.first_year; y <= d.residuals.last_year(); ++y)
            t.rows.push_back({double(y), d.log_values.at(y), d.residuals.at(y),
                              smooth.covers(y, y) ? smooth.at(y) : std::nan("")});
        out.table("detrended_turnover", t);
        summary["trend_slope"] = d.slope;
    }
    return summary;
}

// ---- check ----

json cmd_check(const Run& run, Outputs& out, bool& all_passed) {
    json results = json::array();
    all_passed = true;
    auto emit = [&](const std::vector<CheckResult>& rs, const char* group) {
        for (const auto& r : rs) {
            std::cerr << format_check(r) << "\n";
            all_passed = all_passed && r.passed;
            results.push_back({{"group", group},
                               {"id", r.id},
                               {"name", r.name},
                               {"passed", r.passed},
                               {"detail", r.detail},
                               {"seconds", r.seconds}});
        }
    };
    emit(run_acceptance(), "acceptance");
    emit(run_invariants(), "invariant");
    json j = {{"passed", all_passed}, {"results", results}};
    out.document("check", j);
    return {{"passed", all_passed}, {"checks", results.size()}};
}

void fail(int code, const std::string& kind, const std::string& message, json extra = json::object()) {
    json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
    j.update(extra);
    std::cerr << j.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Overlapping-generations economy with experience-based learners"};
    app.require_subcommand(1, 1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--output-dir", o.output_dir, "Output directory (default: config, EBL_OUTPUT_DIR, .)");
        sub->add_option("--format", o.format, "Table format: csv or json");
        sub->add_option("--q", o.q, "Trading periods per cohort");
        sub->add_option("--R", o.R, "Gross riskless return");
        sub->add_option("--gamma", o.gamma, "Absolute risk aversion");
        sub->add_option("--sigma", o.sigma, "Dividend standard deviation");
        sub->add_option("--theta", o.theta, "Dividend mean");
        sub->add_option("--lambda", o.lambda, "Recency parameter");
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--T", o.T, "Recorded periods");
        sub->add_option("--burn-in", o.burn_in, "Dividends drawn before t=0 (default q)");
        sub->add_option("--path-index", o.path_index, "First random substream");
        sub->add_option("--regime", o.regime, "myopic or nonmyopic_q2");
        sub->add_option("--convention", o.convention, "Turnover convention: interior, replacement or entry_exit");
        sub->add_option("--coefficients", o.coefficients, "Price rule JSON (alpha, betas) instead of solving");
    };

    auto* solve_myopic = app.add_subcommand("solve-myopic", "Myopic equilibrium price rule");
    auto* solve_nonmyopic = app.add_subcommand("solve-nonmyopic", "Equilibrium with multi-period optimizers");
    auto* benchmark = app.add_subcommand("benchmark", "Known-mean benchmark price and holding");
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo paths, moments and predictability");
    auto* tv_cmd = app.add_subcommand("trade-volume", "Trade volume under every turnover convention");
    auto* demo_cmd = app.add_subcommand("demographics", "Cohort-size shock: coefficient sweep and price path");
    auto* growth_cmd = app.add_subcommand("growth", "Population growth sweep");
    auto* measures_cmd = app.add_subcommand("measures", "Experienced returns, gaps, disagreement, turnover");
    auto* check_cmd = app.add_subcommand("check", "Acceptance criteria and invariant suite");
    for (auto* s : {solve_myopic, solve_nonmyopic, benchmark, simulate_cmd, tv_cmd, demo_cmd, growth_cmd, measures_cmd,
                    check_cmd})
        add_common(s);
    add_sim(simulate_cmd);
    add_sim(tv_cmd);
    simulate_cmd->add_option("--paths", o.paths, "Number of paths (OpenMP over paths)");
    simulate_cmd->add_option("--max-lag", o.max_lag, "Autocovariance lags (default q)");
    simulate_cmd->add_option("--regression-lags", o.regression_lags, "Dividend lags in the return regression (default q+2)");
    demo_cmd->add_option("--tau", o.tau, "Birth date of the shocked cohort");
    demo_cmd->add_option("--y", o.y, "Regular cohort mass");
    demo_cmd->add_option("--y-tau", o.y_tau, "Shocked cohort mass");
    demo_cmd->add_option("--sweep-min", o.sweep_min, "Smallest y_tau in the sweep");
    demo_cmd->add_option("--sweep-max", o.sweep_max, "Largest y_tau in the sweep");
    demo_cmd->add_option("--sweep-points", o.sweep_points, "Sweep grid size");
    demo_cmd->add_option("--window", o.window, "Dates on each side of the shock in the price path");
    growth_cmd->add_option("--g", o.g_values, "Growth rates (repeatable)");
    growth_cmd->add_option("--y0", o.y0, "Young mass at t=0");
    measures_cmd->add_option("--returns", o.returns, "CSV with year,return");
    measures_cmd->add_option("--population", o.population, "CSV with year,birth_year,population");
    measures_cmd->add_option("--turnover", o.turnover, "CSV with year,turnover");
    measures_cmd->add_option("--cpi", o.cpi, "CSV with year,cpi; deflates nominal returns");
    measures_cmd->add_option("--first-birth", o.first_birth, "First cohort birth year");
    measures_cmd->add_option("--last-birth", o.last_birth, "Last cohort birth year");
    measures_cmd->add_option("--max-age", o.max_age, "Oldest age in the panel");
    measures_cmd->add_option("--old-min-age", o.old_min_age, "Youngest age counted as old");
    measures_cmd->add_option("--young-max-age", o.young_max_age, "Oldest age counted as young");
    measures_cmd->add_option("--ma-lags", o.ma_lags, "Prior years in the turnover moving average");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        fail(kInvalid, "usage", e.what());
        return kInvalid;
    }

    try {
        const Run run = load_run(o);
        fs::create_directories(run.output_dir);
        Outputs out{run};
        json result;
        bool passed = true;
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "solve-myopic") result = cmd_solve_myopic(run, out);
        else if (name == "solve-nonmyopic") result = cmd_solve_nonmyopic(run, out);
        else if (name == "benchmark") result = cmd_benchmark(run, out);
        else if (name == "simulate") result = cmd_simulate(run, o, out);
        else if (name == "trade-volume") result = cmd_trade_volume(run, o, out);
        else if (name == "demographics") result = cmd_demographics(run, o, out);
        else if (name == "growth") result = cmd_growth(run, o, out);
        else if (name == "measures") result = cmd_measures(run, o, out);
        else result = cmd_check(run, out, passed);
        result["command"] = name;
        result["files"] = out.files;
        std::cout << result.dump(2) << "\n";
        return passed ? kOk : kCheckFailed;
    } catch (const ValidationError& e) {
        fail(kInvalid, "validation", e.what());
        return kInvalid;
    } catch (const ConvergenceError& e) {
        fail(kNoConvergence, "convergence", e.what(), {{"iterations", e.iterations()}, {"residual", e.residual()}});
        return kNoConvergence;
    } catch (const IoError& e) {
        fail(kIo, "io", e.what());
        return kIo;
    } catch (const fs::filesystem_error& e) {
        fail(kIo, "io", e.what());
        return kIo;
    }
}

#include "ebl/io.hpp"

#include "ebl/error.hpp"

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace ebl {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()) + "_" +
                                std::to_string(counter++));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) {
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string() + ": " + std::strerror(errno));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ValidationError("CSV is missing column '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && cell[start] == ' ') ++start;
        cells.push_back(cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

CsvTable read_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, found " +
                                  std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw ValidationError(path.string() + ": empty CSV");
    return t;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : width_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw ValidationError("CSV row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ += ',';
        out_ += cells[i];
    }
    out_ += '\n';
    return *this;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError(what + ": '" + s + "' is not a number");
    return v;
}

long parse_long(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError(what + ": '" + s + "' is not an integer");
    return v;
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == key;
        if (!ok) throw ValidationError("unknown key '" + key + "' in " + where);
    }
}

namespace {

double get_number(const json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
    return v.get<double>();
}

} // namespace

EconomyParams params_from_json(const json& j, EconomyParams p) {
    check_keys(j, {"q", "R", "gamma", "sigma", "theta", "lambda"}, "params");
    if (j.contains("q")) {
        if (!j.at("q").is_number_integer()) throw ValidationError("params.q must be an integer");
        p.q = j.at("q").get<int>();
    }
    p.R = get_number(j, "R", p.R, "params");
    p.gamma = get_number(j, "gamma", p.gamma, "params");
    p.sigma = get_number(j, "sigma", p.sigma, "params");
    p.theta = get_number(j, "theta", p.theta, "params");
    p.lambda = get_number(j, "lambda", p.lambda, "params");
    return p;
}

json params_to_json(const EconomyParams& p) {
    return {{"q", p.q}, {"R", p.R}, {"gamma", p.gamma}, {"sigma", p.sigma}, {"theta", p.theta}, {"lambda", p.lambda}};
}

PriceCoefficients coeffs_from_json(const json& j) {
    if (!j.is_object() || !j.contains("alpha") || !j.contains("betas"))
        throw ValidationError("coefficients need 'alpha' and 'betas'");
    PriceCoefficients c;
    if (!j.at("alpha").is_number()) throw ValidationError("alpha must be a number");
    c.alpha = j.at("alpha").get<double>();
    if (!j.at("betas").is_array()) throw ValidationError("betas must be an array");
    for (const auto& b : j.at("betas")) {
        if (!b.is_number()) throw ValidationError("betas must hold numbers");
        c.betas.push_back(b.get<double>());
    }
    return c;
}

json coeffs_to_json(const PriceCoefficients& c) { return {{"alpha", c.alpha}, {"betas", c.betas}}; }

YearSeries read_year_series(const fs::path& path, const std::string& value_column) {
    const CsvTable t = read_csv(path);
    const std::size_t yc = t.column("year"), vc = t.column(value_column);
    if (t.rows.empty()) throw ValidationError(path.string() + ": no data rows");
    YearSeries s;
    s.first_year = parse_long(t.rows.front()[yc], "year");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const long y = parse_long(t.rows[i][yc], "year");
        if (y != s.first_year + static_cast<long>(i))
            throw ValidationError(path.string() + ": years must be contiguous and increasing (missing " +
                                  std::to_string(s.first_year + static_cast<long>(i)) + ")");
        s.values.push_back(parse_double(t.rows[i][vc], value_column));
    }
    return s;
}

PopulationPanel read_population(const fs::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t yc = t.column("year"), bc = t.column("birth_year"), pc = t.column("population");
    PopulationPanel pop;
    for (const auto& r : t.rows) {
        const double v = parse_double(r[pc], "population");
        if (!(v >= 0.0)) throw ValidationError("population counts must be >= 0");
        pop[{parse_long(r[yc], "year"), parse_long(r[bc], "birth_year")}] = v;
    }
    return pop;
}

} // namespace ebl

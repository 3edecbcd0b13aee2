#pragma once

// Files in and out: 17-significant-digit CSV, JSON documents, whole-file
// atomic writes, and the CSV inputs of the measures command.

#include "ebl/economy.hpp"
#include "ebl/measures.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ebl {

using json = nlohmann::json;

// "%.17g"; non-finite values print as nan, inf, -inf.
std::string format_double(double v);

// Writes to a temporary file in the same directory, then renames it over
// `path`. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column; throws ValidationError when absent.
    std::size_t column(const std::string& name) const;
};

// Plain comma-separated text without quoting. Throws IoError when the file
// cannot be read and ValidationError on ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header);
    CsvWriter& row(const std::vector<std::string>& cells);
    const std::string& str() const { return out_; }

private:
    std::size_t width_;
    std::string out_;
};

double parse_double(const std::string& s, const std::string& what);
long parse_long(const std::string& s, const std::string& what);

// Strict JSON readers: unknown keys and wrong types raise ValidationError.
void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where);
EconomyParams params_from_json(const json& j, EconomyParams base = {});
json params_to_json(const EconomyParams& p);
PriceCoefficients coeffs_from_json(const json& j);
json coeffs_to_json(const PriceCoefficients& c);

// Contiguous year,value series from `value_column`; gaps are an error.
YearSeries read_year_series(const std::filesystem::path& path, const std::string& value_column);
PopulationPanel read_population(const std::filesystem::path& path);

} // namespace ebl

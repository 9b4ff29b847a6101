#pragma once

// JSON and CSV interchange. Doubles are written in shortest round-trip form,
// so identical inputs always produce identical bytes.

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cvretro/chain.hpp"
#include "cvretro/gaussian.hpp"
#include "cvretro/retrodiction.hpp"
#include "cvretro/scenario.hpp"

namespace cvretro::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const GaussianOperator& op);
Json to_json(const Scenario& sc);
Json to_json(const MeterStatistics& stats);
Json to_json(const oracle::Comparison& c);
Json to_json(const ValidationReport& r);

// Readers throw ConfigError naming the offending field, e.g. "rho.cov[1][0]".
Vector vector_from_json(const Json& j, const std::string& path);
Matrix matrix_from_json(const Json& j, const std::string& path);
GaussianOperator gaussian_from_json(const Json& j, const std::string& path = "operator");
Scenario scenario_from_json(const Json& j, const std::string& path = "scenario");

/// Parses text; syntax errors are reported as ConfigError with line and column.
Json parse_json_text(std::string_view text, const std::string& source);
Json read_json_file(const std::string& file);

/// Stable serialization: 2-space indent, trailing newline.
std::string dump(const Json& j);

/// CSV table with a leading "# config: {...}" line and a header row.
class CsvTable {
 public:
  CsvTable(std::vector<std::string> columns, std::string config_line);

  void add_row(const std::vector<double>& values);
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::string config_line_;
  std::vector<std::vector<double>> rows_;
};

/// Rows (i, j, cov, mean) over i <= j; the mean column is filled on the diagonal only.
std::string meter_stats_csv(const MeterStatistics& stats, const std::string& config_line);

void write_file(const std::string& path, const std::string& contents);

}  // namespace cvretro::io

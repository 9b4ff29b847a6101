#include "cvretro/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cvretro::io {

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError("field '" + path + "': " + what);
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(path, "must be finite");
  return v;
}

const Json& member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) field_error(path + "." + key, "missing");
  return *it;
}

std::string join_path(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

Eigen::Vector4d vector4_or_zero(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) return Eigen::Vector4d::Zero();
  const Vector v = vector_from_json(j.at(key), join_path(path, key));
  if (v.size() != 4) field_error(join_path(path, key), "expected 4 entries");
  return v;
}

// Line and column of a byte offset (1-based).
std::pair<int, int> locate(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

Json to_json(const GaussianOperator& op) {
  Json j;
  j["n_modes"] = op.n_modes();
  j["kind"] = to_string(op.kind());
  j["mean"] = to_json(op.mean());
  j["cov"] = to_json(op.cov());
  return j;
}

Json to_json(const Scenario& sc) {
  Json j;
  j["m"] = sc.m;
  j["z"] = sc.z;
  j["s"] = sc.s;
  j["s_prime"] = sc.s_prime;
  j["angles"] = sc.angles;
  j["rho_means"] = to_json(Vector(sc.rho_means));
  j["effect_means"] = to_json(Vector(sc.effect_means));
  j["meter_means"] = to_json(sc.meter_means);
  return j;
}

Json to_json(const MeterStatistics& stats) {
  Json j;
  j["postselected"] = stats.postselected;
  j["pi_mean"] = to_json(stats.pi_mean);
  j["pi_cov"] = to_json(stats.pi_cov);
  return j;
}

Json to_json(const oracle::Comparison& c) {
  Json j;
  j["name"] = c.name;
  j["analytic"] = c.analytic;
  j["empirical"] = c.empirical;
  j["stderr"] = c.standard_error;
  j["z_score"] = c.z_score;
  j["passed"] = c.passed;
  return j;
}

Json to_json(const ValidationReport& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["admissible"] = r.admissible;
  j["positive_definite"] = r.positive_definite;
  j["symmetry_defect"] = r.symmetry_defect;
  j["min_eigenvalue"] = r.min_eigenvalue;
  if (std::isfinite(r.min_symplectic_eigenvalue))
    j["min_symplectic_eigenvalue"] = r.min_symplectic_eigenvalue;
  else
    j["min_symplectic_eigenvalue"] = nullptr;
  j["heisenberg_margin"] = r.heisenberg_margin;
  j["issues"] = r.issues;
  return j;
}

Vector vector_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number_at(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) field_error(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    const Vector row = vector_from_json(j[r], row_path);
    if (r == 0) m.resize(rows, row.size());
    if (row.size() != m.cols()) field_error(row_path, "ragged row");
    m.row(r) = row.transpose();
  }
  return m;
}

GaussianOperator gaussian_from_json(const Json& j, const std::string& path) {
  const Json& n_json = member(j, "n_modes", path);
  if (!n_json.is_number_integer() || n_json.get<long long>() < 1) field_error(path + ".n_modes", "expected a positive integer");
  const int n = n_json.get<int>();

  const Json& kind_json = member(j, "kind", path);
  if (!kind_json.is_string()) field_error(path + ".kind", "expected \"state\" or \"effect\"");
  OperatorKind kind;
  try {
    kind = operator_kind_from_string(kind_json.get<std::string>());
  } catch (const std::exception& e) {
    field_error(path + ".kind", e.what());
  }

  const Vector mean = vector_from_json(member(j, "mean", path), path + ".mean");
  if (mean.size() != 2 * n) field_error(path + ".mean", "expected 2*n_modes entries");
  const Matrix cov = matrix_from_json(member(j, "cov", path), path + ".cov");
  if (cov.rows() != 2 * n || cov.cols() != 2 * n) field_error(path + ".cov", "expected a 2*n_modes square matrix");
  try {
    return GaussianOperator(kind, mean, cov);
  } catch (const std::invalid_argument& e) {
    field_error(path, e.what());
  }
}

Scenario scenario_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  Scenario sc;
  const Json& m_json = member(j, "m", path);
  if (!m_json.is_number_integer() || m_json.get<long long>() < 1) field_error(path + ".m", "expected a positive integer");
  sc.m = m_json.get<int>();
  sc.z = j.contains("z") ? number_at(j["z"], path + ".z") : 1.0;
  if (!(sc.z > 0.0)) field_error(path + ".z", "must be positive");
  sc.s = j.contains("s") ? number_at(j["s"], path + ".s") : 0.0;
  sc.s_prime = j.contains("s_prime") ? number_at(j["s_prime"], path + ".s_prime") : 0.0;

  if (j.contains("angles")) {
    if (j.contains("angle_span")) field_error(path + ".angle_span", "conflicts with explicit angles");
    const Vector a = vector_from_json(j["angles"], path + ".angles");
    if (a.size() != sc.m) field_error(path + ".angles", "expected m entries");
    sc.angles.assign(a.data(), a.data() + a.size());
  } else {
    AngleSpan span = AngleSpan::Full;
    if (j.contains("angle_span")) {
      const Json& sp = j["angle_span"];
      if (sp == "full")
        span = AngleSpan::Full;
      else if (sp == "half")
        span = AngleSpan::Half;
      else
        field_error(path + ".angle_span", "expected \"full\" or \"half\"");
    }
    sc.angles = Scenario::equidistant(sc.m, sc.z, sc.s, sc.s_prime, span).angles;
  }

  sc.rho_means = vector4_or_zero(j, "rho_means", path);
  sc.effect_means = vector4_or_zero(j, "effect_means", path);
  if (j.contains("meter_means")) {
    sc.meter_means = vector_from_json(j["meter_means"], path + ".meter_means");
    if (sc.meter_means.size() != 2 * sc.m) field_error(path + ".meter_means", "expected 2m entries (q then pi)");
  } else {
    sc.meter_means = Vector::Zero(2 * sc.m);
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    static const char* known[] = {"m", "z", "s", "s_prime", "angles", "angle_span", "rho_means", "effect_means",
                                  "meter_means"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) field_error(path + "." + key, "unknown field");
  }
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    field_error(path, e.what());
  }
  return sc;
}

Json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    // Keep only the descriptive tail of nlohmann's message.
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

Json read_json_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + file + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), file);
}

std::string dump(const Json& j) {
  // nlohmann writes doubles in shortest round-trip form.
  return j.dump(2) + "\n";
}

CsvTable::CsvTable(std::vector<std::string> columns, std::string config_line)
    : columns_(std::move(columns)), config_line_(std::move(config_line)) {
  if (columns_.empty()) throw std::invalid_argument("CSV needs at least one column");
}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) throw std::invalid_argument("CSV row width mismatch");
  rows_.push_back(values);
}

std::string CsvTable::str() const {
  std::string out = "# config: " + config_line_ + "\n";
  for (std::size_t c = 0; c < columns_.size(); ++c) out += (c ? "," : "") + columns_[c];
  out += "\n";
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      out += format_double(row[c]);
    }
    out += "\n";
  }
  return out;
}

std::string meter_stats_csv(const MeterStatistics& stats, const std::string& config_line) {
  std::string out = "# config: " + config_line + "\n";
  out += "i,j,cov,mean\n";
  const auto m = stats.pi_cov.rows();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(stats.pi_cov(i, j)) + ",";
      if (i == j) out += format_double(stats.pi_mean(i));
      out += "\n";
    }
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace cvretro::io

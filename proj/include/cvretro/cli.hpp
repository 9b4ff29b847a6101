#pragma once

// Scenario runner behind the cvretro executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvretro/json_io.hpp"
#include "cvretro/scenario.hpp"

namespace cvretro::cli {

enum class Command { Butterfly, SingleRetro, TwoModeRetro, Heterodyne, JointPredict, JointRetro, OptimalCombo, Verify };

std::string to_string(Command c);
/// Throws ConfigError for an unknown name.
Command command_from_string(const std::string& name);

/// Projective homodyne effect given by angle and outcome; widened by RunConfig::eps.
struct HomodyneSpec {
  double phi = 0.0;
  double outcome = 0.0;
};

/// Lists of m, z, s, s_prime values; the sweep covers their Cartesian product.
struct SweepSpec {
  std::vector<int> m;
  std::vector<double> z;
  std::vector<double> s;
  std::vector<double> s_prime;
};

struct RunConfig {
  Command command = Command::Verify;
  std::optional<GaussianOperator> rho;
  std::optional<GaussianOperator> effect;
  std::optional<HomodyneSpec> homodyne_effect;
  std::optional<Scenario> scenario;
  std::optional<SweepSpec> sweep;
  /// Standard two-mode pair used by two-mode-retro when rho/effect are absent.
  double s = 2.0;
  double s_prime = -2.0;
  /// Measured quadrature for single-retro / two-mode-retro, and target meter for optimal-combo.
  double phi = 0.0;
  int mode = 0;
  int target = 0;
  int phi_points = 64;
  double eps = kDefaultProjectiveEps;
  std::string out = ".";
  std::uint64_t seed = 20240917;
  long long trials = 1'000'000;
  bool quick = false;
  /// Adds chain-simulator comparisons to joint-retro / joint-predict.
  bool monte_carlo = false;
};

/// Parses the JSON config format; unknown or malformed fields throw ConfigError.
RunConfig parse_run_config(const io::Json& j, const std::string& source = "config");

/// Fully resolved configuration, recorded in every output file.
io::Json to_json(const RunConfig& config);

/// Executes the command and writes its artifacts under config.out.
/// Returns the process exit status: 0 on success, 1 when verification fails.
int run(const RunConfig& config, std::ostream& log);

/// Entry point of the executable: flag parsing plus run().
int main_entry(int argc, char** argv);

}  // namespace cvretro::cli

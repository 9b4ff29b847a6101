#include "cvretro/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "cvretro/closed_form.hpp"
#include "cvretro/joint_measurement.hpp"
#include "cvretro/retrodiction.hpp"
#include "cvretro/verify.hpp"

namespace cvretro::cli {

namespace {

using io::Json;

constexpr std::pair<Command, const char*> kCommandNames[] = {
    {Command::Butterfly, "butterfly"},        {Command::SingleRetro, "single-retro"},
    {Command::TwoModeRetro, "two-mode-retro"}, {Command::Heterodyne, "heterodyne"},
    {Command::JointPredict, "joint-predict"},  {Command::JointRetro, "joint-retro"},
    {Command::OptimalCombo, "optimal-combo"},  {Command::Verify, "verify"},
};

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError("field '" + path + "': " + what);
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(path, "must be finite");
  return v;
}

long long get_integer(const Json& j, const std::string& path, long long lo) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  const long long v = j.get<long long>();
  if (v < lo) field_error(path, "must be >= " + std::to_string(lo));
  return v;
}

template <class T>
std::vector<T> get_list(const Json& j, const std::string& path, bool integer) {
  if (!j.is_array() || j.empty()) field_error(path, "expected a non-empty array");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    out.push_back(integer ? static_cast<T>(get_integer(j[i], p, 1)) : static_cast<T>(get_number(j[i], p)));
  }
  return out;
}

PqsPair resolve_pair(const RunConfig& c, const char* command) {
  if (!c.rho) throw ConfigError(std::string(command) + ": config needs 'rho'");
  GaussianOperator effect = c.homodyne_effect ? make_homodyne_effect(c.homodyne_effect->phi, c.homodyne_effect->outcome, c.eps)
                                              : c.effect ? *c.effect
                                                         : throw ConfigError(std::string(command) + ": config needs 'effect'");
  return PqsPair(*c.rho, std::move(effect));
}

// Defaults reproduce the narrow blue butterfly: rho squeezed in p, E squeezed in x.
PqsPair default_butterfly_pair() {
  return PqsPair(GaussianOperator(OperatorKind::State, Vector::Zero(2), Eigen::Vector2d(2.5, 0.1).asDiagonal().toDenseMatrix()),
                 GaussianOperator(OperatorKind::Effect, Vector::Zero(2), Eigen::Vector2d(0.1, 2.5).asDiagonal().toDenseMatrix()));
}

std::string path_in(const RunConfig& c, const std::string& name) { return (std::filesystem::path(c.out) / name).string(); }

std::string config_line(const RunConfig& c) { return to_json(c).dump(); }

Json with_config(const RunConfig& c, Json result) {
  Json j;
  j["config"] = to_json(c);
  for (auto it = result.begin(); it != result.end(); ++it) j[it.key()] = it.value();
  return j;
}

void emit(const RunConfig& c, std::ostream& log, const std::string& name, const std::string& contents) {
  const std::string p = path_in(c, name);
  io::write_file(p, contents);
  log << "wrote " << p << "\n";
}

Scenario scenario_or_default(const RunConfig& c) {
  return c.scenario ? *c.scenario : Scenario::equidistant(2, 1.0, 0.0, 0.0);
}

int run_butterfly(const RunConfig& c, std::ostream& log) {
  const PqsPair pair = c.rho ? resolve_pair(c, "butterfly") : default_butterfly_pair();
  if (pair.n_modes() != 1) throw ConfigError("butterfly: rho and effect must be single-mode");
  const auto grid = angle_grid(c.phi_points);
  const auto curve = butterfly_curve(pair, grid);
  io::CsvTable table({"phi", "variance"}, config_line(c));
  for (const auto& p : curve) table.add_row({p.phi, p.variance});
  emit(c, log, "butterfly.csv", table.str());
  return 0;
}

Json retro_json(const RetrodictionResult& r) {
  Json j;
  j["provenance"] = to_string(r.provenance);
  j["mode"] = r.direction.mode;
  j["phi"] = r.direction.phi;
  j["mean"] = r.distribution.mean();
  j["variance"] = r.distribution.variance();
  return j;
}

int run_single_retro(const RunConfig& c, std::ostream& log) {
  const PqsPair pair = c.rho ? resolve_pair(c, "single-retro") : default_butterfly_pair();
  const QuadratureDirection dir{c.mode, c.phi};
  const RetrodictionResult r = pair.n_modes() == 1 ? pqs_distribution_single(pair, dir) : pqs_projective(pair, dir);
  Json j = retro_json(r);
  j["rho_validation"] = io::to_json(validate(pair.rho()));
  j["effect_validation"] = io::to_json(validate(pair.effect()));
  emit(c, log, "single_retro.json", io::dump(with_config(c, std::move(j))));
  return 0;
}

int run_two_mode_retro(const RunConfig& c, std::ostream& log) {
  const GaussianOperator rho = c.rho ? *c.rho : make_two_mode_squeezed(c.s);
  const GaussianOperator effect = c.effect ? *c.effect : make_epr_effect(c.s_prime);
  if (rho.n_modes() != 2 || effect.n_modes() != 2) throw ConfigError("two-mode-retro: rho and effect must have two modes");

  const auto grid = angle_grid(c.phi_points);
  std::vector<RetrodictionResult> rows(grid.size(), pqs_two_mode(rho, effect, {0, 0.0}));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(grid.size()); ++i) rows[i] = pqs_two_mode(rho, effect, {0, grid[i]});

  io::CsvTable table({"phi", "mean", "variance"}, config_line(c));
  double lo = rows.front().distribution.variance(), hi = lo;
  for (const auto& r : rows) {
    table.add_row({r.direction.phi, r.distribution.mean(), r.distribution.variance()});
    lo = std::min(lo, r.distribution.variance());
    hi = std::max(hi, r.distribution.variance());
  }
  const RetrodictionResult at_phi = pqs_two_mode(rho, effect, {0, c.phi});
  const double vx = pqs_two_mode(rho, effect, {0, 0.0}).distribution.variance();
  const double vp = pqs_two_mode(rho, effect, {0, kPi / 2}).distribution.variance();

  Json j = retro_json(at_phi);
  j["variance_x"] = vx;
  j["variance_p"] = vp;
  j["variance_product"] = vx * vp;
  j["HUR-violating"] = violates_heisenberg(vx, vp);
  j["variance_spread"] = hi - lo;
  emit(c, log, "two_mode_retro.json", io::dump(with_config(c, std::move(j))));
  emit(c, log, "two_mode_retro.csv", table.str());
  return 0;
}

int run_heterodyne(const RunConfig& c, std::ostream& log) {
  const PqsPair pair = c.rho ? resolve_pair(c, "heterodyne") : default_butterfly_pair();
  const HeterodyneEstimate h = heterodyne_retrodiction(pair);
  Json j;
  j["mean"] = io::to_json(Vector(h.mean));
  j["cov"] = io::to_json(Matrix(h.cov));
  emit(c, log, "heterodyne.json", io::dump(with_config(c, std::move(j))));
  return 0;
}

Json chain_comparisons(const RunConfig& c, const Scenario& sc, const MeterStatistics& analytic, bool postselected,
                       bool& all_passed) {
  oracle::ChainOptions opts;
  // Without postselection the final measurement carries no information.
  if (!postselected) opts.effect_cov = Matrix(1e8 * Matrix::Identity(4, 4));
  const auto est = oracle::simulate_chain(sc, c.trials, c.seed, opts);
  Json list = Json::array();
  all_passed = true;
  for (int i = 0; i < sc.m; ++i) {
    for (int k = i; k < sc.m; ++k) {
      auto cmp = oracle::compare_statistical("cov[" + std::to_string(i) + "," + std::to_string(k) + "]",
                                             analytic.pi_cov(i, k), est.empirical.pi_cov(i, k), est.cov_stderr(i, k));
      all_passed = all_passed && cmp.passed;
      list.push_back(io::to_json(cmp));
    }
    if (postselected) {
      auto cmp = oracle::compare_statistical("mean[" + std::to_string(i) + "]", analytic.pi_mean(i),
                                             est.empirical.pi_mean(i), est.mean_stderr(i));
      all_passed = all_passed && cmp.passed;
      list.push_back(io::to_json(cmp));
    }
  }
  return list;
}

int run_joint(const RunConfig& c, std::ostream& log, bool postselected) {
  const Scenario sc = scenario_or_default(c);
  const MeterStatistics stats = postselected ? retrodict_meter_stats(sc) : predicted_meter_stats(sc);
  const std::string stem = postselected ? "joint_retro" : "joint_predict";
  Json j;
  j["statistics"] = io::to_json(stats);
  int status = 0;
  if (c.monte_carlo) {
    bool ok = true;
    j["monte_carlo"] = chain_comparisons(c, sc, stats, postselected, ok);
    if (!ok) {
      log << stem << ": Monte Carlo disagreement beyond 3 standard errors\n";
      status = 1;
    }
  }
  emit(c, log, stem + ".json", io::dump(with_config(c, std::move(j))));
  emit(c, log, stem + ".csv", io::meter_stats_csv(stats, config_line(c)));
  return status;
}

int run_optimal_combo(const RunConfig& c, std::ostream& log) {
  const Scenario base = scenario_or_default(c);
  if (c.target < 0 || c.target >= base.m) throw ConfigError("field 'target': must index a meter of the scenario");
  const CombinationResult r = optimal_combination(base, c.target);
  Json j;
  j["target"] = c.target;
  j["weights"] = io::to_json(r.weights);
  j["variance"] = r.variance;
  j["closed_form_weights"] = r.closed_form_weights;
  if (r.closed_form) j["closed_form_variance"] = *r.closed_form;
  emit(c, log, "optimal_combo.json", io::dump(with_config(c, std::move(j))));

  if (c.sweep) {
    struct Point {
      int m;
      double z, s, sp;
    };
    const SweepSpec& sw = *c.sweep;
    const std::vector<int> ms = sw.m.empty() ? std::vector<int>{base.m} : sw.m;
    const std::vector<double> zs = sw.z.empty() ? std::vector<double>{base.z} : sw.z;
    const std::vector<double> ss = sw.s.empty() ? std::vector<double>{base.s} : sw.s;
    const std::vector<double> sps = sw.s_prime.empty() ? std::vector<double>{base.s_prime} : sw.s_prime;
    std::vector<Point> points;
    for (int m : ms)
      for (double z : zs)
        for (double s : ss)
          for (double sp : sps) points.push_back({m, z, s, sp});

    // Each point runs serially inside; the sweep is the parallel dimension.
    std::vector<double> variance(points.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(points.size()); ++i) {
      const Point& p = points[i];
      const Scenario sc = Scenario::equidistant(p.m, p.z, p.s, p.sp);
      variance[i] = optimal_combination_variance(sc, std::min(c.target, p.m - 1));
    }
    io::CsvTable table({"m", "z", "s", "s_prime", "variance", "closed_form"}, config_line(c));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Point& p = points[i];
      table.add_row({double(p.m), p.z, p.s, p.sp, variance[i],
                     closed_form::optimal_combination_variance(p.m, p.z, p.s, p.sp)});
    }
    emit(c, log, "optimal_combo_sweep.csv", table.str());
  }
  return 0;
}

int run_verify(const RunConfig& c, std::ostream& log) {
  VerifyOptions opt = c.quick ? quick_verify_options() : VerifyOptions{};
  opt.seed = c.seed;
  if (!c.quick) opt.trials = c.trials;
  const VerifyReport report = run_verification(opt);

  Json list = Json::array();
  for (const auto& cmp : report.comparisons) {
    log << (cmp.passed ? "PASS " : "FAIL ") << cmp.name << ": analytic " << io::format_double(cmp.analytic)
        << " empirical " << io::format_double(cmp.empirical);
    if (cmp.standard_error > 0) log << " z " << io::format_double(cmp.z_score);
    log << "\n";
    list.push_back(io::to_json(cmp));
  }
  log << report.comparisons.size() << " checks in " << report.seconds << " s\n";
  Json j;
  j["trials"] = opt.trials;
  j["all_passed"] = report.all_passed();
  j["comparisons"] = std::move(list);
  emit(c, log, "verify.json", io::dump(with_config(c, std::move(j))));
  return report.all_passed() ? 0 : 1;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommandNames)
    if (cmd == c) return name;
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (const auto& [cmd, n] : kCommandNames)
    if (name == n) return cmd;
  throw ConfigError("unknown command '" + name + "'");
}

RunConfig parse_run_config(const Json& j, const std::string& source) {
  if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
  RunConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    if (key == "command") {
      if (!v.is_string()) field_error(key, "expected a string");
      try {
        c.command = command_from_string(v.get<std::string>());
      } catch (const ConfigError& e) {
        field_error(key, e.what());
      }
    } else if (key == "rho") {
      c.rho = io::gaussian_from_json(v, key);
    } else if (key == "effect") {
      if (v.is_object() && v.contains("homodyne")) {
        const Json& h = v["homodyne"];
        if (!h.is_object()) field_error("effect.homodyne", "expected an object");
        HomodyneSpec spec;
        if (h.contains("phi")) spec.phi = get_number(h["phi"], "effect.homodyne.phi");
        if (h.contains("outcome")) spec.outcome = get_number(h["outcome"], "effect.homodyne.outcome");
        c.homodyne_effect = spec;
      } else {
        c.effect = io::gaussian_from_json(v, key);
      }
    } else if (key == "scenario") {
      c.scenario = io::scenario_from_json(v, key);
    } else if (key == "sweep") {
      if (!v.is_object()) field_error(key, "expected an object");
      SweepSpec sw;
      for (auto s = v.begin(); s != v.end(); ++s) {
        const std::string p = "sweep." + s.key();
        if (s.key() == "m")
          sw.m = get_list<int>(s.value(), p, true);
        else if (s.key() == "z")
          sw.z = get_list<double>(s.value(), p, false);
        else if (s.key() == "s")
          sw.s = get_list<double>(s.value(), p, false);
        else if (s.key() == "s_prime")
          sw.s_prime = get_list<double>(s.value(), p, false);
        else
          field_error(p, "unknown field");
      }
      for (double z : sw.z)
        if (!(z > 0)) field_error("sweep.z", "values must be positive");
      c.sweep = sw;
    } else if (key == "s") {
      c.s = get_number(v, key);
    } else if (key == "s_prime") {
      c.s_prime = get_number(v, key);
    } else if (key == "phi") {
      c.phi = get_number(v, key);
    } else if (key == "mode") {
      c.mode = static_cast<int>(get_integer(v, key, 0));
    } else if (key == "target") {
      c.target = static_cast<int>(get_integer(v, key, 0));
    } else if (key == "phi_points") {
      c.phi_points = static_cast<int>(get_integer(v, key, 1));
    } else if (key == "eps") {
      c.eps = get_number(v, key);
      if (!(c.eps > 0)) field_error(key, "must be positive");
    } else if (key == "out") {
      if (!v.is_string()) field_error(key, "expected a string");
      c.out = v.get<std::string>();
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) field_error(key, "expected an unsigned integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "trials") {
      c.trials = get_integer(v, key, 1000);
    } else if (key == "quick") {
      if (!v.is_boolean()) field_error(key, "expected true or false");
      c.quick = v.get<bool>();
    } else if (key == "monte_carlo") {
      if (!v.is_boolean()) field_error(key, "expected true or false");
      c.monte_carlo = v.get<bool>();
    } else {
      field_error(key, "unknown field");
    }
  }
  if (c.effect && c.homodyne_effect) field_error("effect", "conflicting definitions");
  return c;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = to_string(c.command);
  if (c.rho) j["rho"] = io::to_json(*c.rho);
  if (c.effect) j["effect"] = io::to_json(*c.effect);
  if (c.homodyne_effect) j["effect"] = {{"homodyne", {{"phi", c.homodyne_effect->phi}, {"outcome", c.homodyne_effect->outcome}}}};
  if (c.scenario) j["scenario"] = io::to_json(*c.scenario);
  if (c.sweep) {
    Json sw;
    if (!c.sweep->m.empty()) sw["m"] = c.sweep->m;
    if (!c.sweep->z.empty()) sw["z"] = c.sweep->z;
    if (!c.sweep->s.empty()) sw["s"] = c.sweep->s;
    if (!c.sweep->s_prime.empty()) sw["s_prime"] = c.sweep->s_prime;
    j["sweep"] = sw;
  }
  j["s"] = c.s;
  j["s_prime"] = c.s_prime;
  j["phi"] = c.phi;
  j["mode"] = c.mode;
  j["target"] = c.target;
  j["phi_points"] = c.phi_points;
  j["eps"] = c.eps;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["quick"] = c.quick;
  j["monte_carlo"] = c.monte_carlo;
  return j;
}

int run(const RunConfig& c, std::ostream& log) {
  if (c.phi_points < 1) throw ConfigError("field 'phi_points': grid must be non-empty");
  std::filesystem::create_directories(c.out);
  switch (c.command) {
    case Command::Butterfly: return run_butterfly(c, log);
    case Command::SingleRetro: return run_single_retro(c, log);
    case Command::TwoModeRetro: return run_two_mode_retro(c, log);
    case Command::Heterodyne: return run_heterodyne(c, log);
    case Command::JointPredict: return run_joint(c, log, false);
    case Command::JointRetro: return run_joint(c, log, true);
    case Command::OptimalCombo: return run_optimal_combo(c, log);
    case Command::Verify: return run_verify(c, log);
  }
  return 2;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Gaussian retrodiction and joint quadrature measurement runner"};
  std::string command, config_file, out;
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<int> phi_points;
  std::optional<double> eps;
  bool quick = false;

  std::vector<std::string> names;
  for (const auto& [cmd, name] : kCommandNames) names.push_back(name);
  app.add_option("command", command, "One of: butterfly, single-retro, two-mode-retro, heterodyne, joint-predict, "
                                     "joint-retro, optimal-combo, verify")
      ->check(CLI::IsMember(names));
  app.add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out, "Output directory (default: current directory)");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--trials", trials, "Monte Carlo trials (>= 1000)")->check(CLI::Range(1000LL, (1LL << 40)));
  app.add_option("--phi-points", phi_points, "Angles on the phi grid")->check(CLI::PositiveNumber);
  app.add_option("--eps", eps, "Width of the regularized projective homodyne effect")->check(CLI::PositiveNumber);
  app.add_flag("--quick", quick, "verify with 1e5 trials per statistic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig c;
    if (!config_file.empty()) c = parse_run_config(io::read_json_file(config_file), config_file);
    if (!command.empty()) {
      const Command cmd = command_from_string(command);
      if (!config_file.empty() && cmd != c.command && io::read_json_file(config_file).contains("command"))
        throw ConfigError("command '" + command + "' conflicts with the config's '" + to_string(c.command) + "'");
      c.command = cmd;
    } else if (config_file.empty()) {
      throw ConfigError("give a command or --config");
    }
    if (!out.empty()) c.out = out;
    if (seed) c.seed = *seed;
    if (trials) c.trials = *trials;
    if (phi_points) c.phi_points = *phi_points;
    if (eps) c.eps = *eps;
    if (quick) c.quick = true;
    return run(c, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cvretro::cli

#include "cvretro/verify.hpp"

#include <chrono>

#include "cvretro/closed_form.hpp"
#include "cvretro/fock.hpp"
#include "cvretro/joint_measurement.hpp"

namespace cvretro {

namespace {

using oracle::compare_exact;
using oracle::compare_statistical;

PqsPair diagonal_pair(double rx, double rp, double ex, double ep, Eigen::Vector2d rho_mean = {0, 0},
                      Eigen::Vector2d effect_mean = {0, 0}) {
  return PqsPair(GaussianOperator(OperatorKind::State, rho_mean, Eigen::Vector2d(rx, rp).asDiagonal().toDenseMatrix()),
                 GaussianOperator(OperatorKind::Effect, effect_mean,
                                  Eigen::Vector2d(ex, ep).asDiagonal().toDenseMatrix()));
}

void add_sequential(std::vector<oracle::Comparison>& out, const std::string& label, const PqsPair& pair, double phi,
                    const VerifyOptions& opt, std::uint64_t salt) {
  const RetrodictionResult exact = pqs_distribution_single(pair, {0, phi});
  const auto est = oracle::simulate_sequential_single(pair, {0, phi}, opt.trials, opt.seed + salt);
  out.push_back(compare_statistical(label + " variance", exact.distribution.variance(), est.variance,
                                    est.variance_stderr));
  out.push_back(compare_statistical(label + " mean", exact.distribution.mean(), est.mean, est.mean_stderr));
}

void add_chain(std::vector<oracle::Comparison>& out, const std::string& label, const Scenario& sc,
               const MeterStatistics& analytic, const oracle::ChainEstimate& est, bool with_means) {
  for (int i = 0; i < sc.m; ++i) {
    for (int j = i; j < sc.m; ++j) {
      const std::string cell = "[" + std::to_string(i) + "," + std::to_string(j) + "]";
      out.push_back(compare_statistical(label + " cov" + cell, analytic.pi_cov(i, j), est.empirical.pi_cov(i, j),
                                        est.cov_stderr(i, j)));
    }
    if (with_means)
      out.push_back(compare_statistical(label + " mean[" + std::to_string(i) + "]", analytic.pi_mean(i),
                                        est.empirical.pi_mean(i), est.mean_stderr(i)));
  }
}

}  // namespace

VerifyOptions quick_verify_options() {
  VerifyOptions o;
  o.trials = 100'000;
  return o;
}

bool VerifyReport::all_passed() const {
  for (const auto& c : comparisons)
    if (!c.passed) return false;
  return !comparisons.empty();
}

VerifyReport run_verification(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  VerifyReport report;
  auto& out = report.comparisons;

  // Single-mode retrodiction against sequential sampling.
  add_sequential(out, "butterfly phi=0", diagonal_pair(2.5, 0.1, 0.1, 2.5), 0.0, opt, 1);
  add_sequential(out, "butterfly phi=pi/4", diagonal_pair(2.5, 0.1, 0.1, 2.5), kPi / 4, opt, 2);
  add_sequential(out, "displaced pair phi=1", diagonal_pair(1.5, 1.0 / 6, 0.4, 0.9, {1.0, -0.5}, {-0.3, 0.8}), 1.0,
                 opt, 3);

  // Postselected meter bank against the chain simulator.
  {
    const Scenario sc = Scenario::equidistant(2, 1.0, 0.0, 0.0);
    add_chain(out, "m=2 postselected", sc, retrodict_meter_stats(sc), oracle::simulate_chain(sc, opt.trials, opt.seed + 4),
              false);
  }
  {
    Scenario sc = Scenario::equidistant(1, 1.0, 2.0, -2.0);
    add_chain(out, "m=1 EPR s=2 s'=-2", sc, retrodict_meter_stats(sc),
              oracle::simulate_chain(sc, opt.trials, opt.seed + 5), false);
  }
  {
    Scenario sc = Scenario::equidistant(3, 0.7, 1.0, -0.5);
    sc.rho_means << 0.4, -0.2, 0.1, 0.3;
    sc.effect_means << -0.6, 0.5, 0.2, -0.1;
    sc.meter_means << 0.1, -0.3, 0.2, 0.5, 0.0, -0.4;
    add_chain(out, "m=3 displaced", sc, retrodict_meter_stats(sc), oracle::simulate_chain(sc, opt.trials, opt.seed + 6),
              true);
  }
  {
    // An uninformative final measurement leaves the unconditioned statistics.
    const Scenario sc = Scenario::equidistant(3, 1.0, 0.5, 0.0);
    oracle::ChainOptions co;
    co.effect_cov = Matrix(1e8 * Matrix::Identity(4, 4));
    add_chain(out, "m=3 uninformative", sc, predicted_meter_stats(sc),
              oracle::simulate_chain(sc, opt.trials, opt.seed + 7, co), false);
  }

  // Fock-space marginals of the two-mode squeezed state.
  {
    const double s = 1.0;
    const auto rho = oracle::build_tmss_fock(s, opt.cutoff);
    const auto grid = oracle::uniform_grid(-5.0, 5.0, 201);
    const GaussianOperator gauss = make_two_mode_squeezed(s);
    for (double phi : {0.0, 1.0}) {
      const auto density = oracle::quadrature_marginal_fock(rho, {0, phi}, grid);
      const ScalarGaussian g = marginal(gauss, {0, phi});
      double linf = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) linf = std::max(linf, std::abs(density[i] - g.density(grid[i])));
      out.push_back(compare_exact(std::string("Fock marginal Linf phi=") + (phi == 0.0 ? "0" : "1"), 0.0, linf, 1e-6));
    }
    const double nbar = std::sinh(0.5 * s) * std::sinh(0.5 * s);
    out.push_back(compare_exact("Fock mean photon number", nbar, oracle::mean_photon_number(rho, 0),
                                std::max(1e-12, opt.cutoff * rho.trace_deficiency() + 1e-12)));
  }

  // Structured kernel against the dense pipeline.
  {
    Scenario sc = Scenario::equidistant(3, 0.7, 1.0, -0.5);
    sc.rho_means << 0.4, -0.2, 0.1, 0.3;
    sc.effect_means << -0.6, 0.5, 0.2, -0.1;
    sc.meter_means << 0.1, -0.3, 0.2, 0.5, 0.0, -0.4;
    const MeterStatistics fast = retrodict_meter_stats(sc), dense = retrodict_meter_stats_reference(sc);
    out.push_back(compare_exact("structured vs dense cov", 0.0, (fast.pi_cov - dense.pi_cov).cwiseAbs().maxCoeff(),
                                1e-10));
    out.push_back(compare_exact("structured vs dense mean", 0.0, (fast.pi_mean - dense.pi_mean).cwiseAbs().maxCoeff(),
                                1e-10));
    const Matrix closed = closed_form::postselected_meter_cov(sc);
    out.push_back(compare_exact("conditioning vs closed form cov", 0.0, (fast.pi_cov - closed).cwiseAbs().maxCoeff(),
                                1e-10));
  }

  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace cvretro

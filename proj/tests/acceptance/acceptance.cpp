// Acceptance suite: one PASS/FAIL line per criterion, each with a wall-clock budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "cvretro/chain.hpp"
#include "cvretro/closed_form.hpp"
#include "cvretro/fock.hpp"
#include "cvretro/joint_measurement.hpp"
#include "cvretro/retrodiction.hpp"

using namespace cvretro;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

PqsPair fig1_pair(double a, double b) {
  return PqsPair(GaussianOperator(OperatorKind::State, Vector::Zero(2), Eigen::Vector2d(a, b).asDiagonal().toDenseMatrix()),
                 GaussianOperator(OperatorKind::Effect, Vector::Zero(2), Eigen::Vector2d(b, a).asDiagonal().toDenseMatrix()));
}

Outcome coherent_pair() {
  Outcome o;
  const PqsPair pair(make_vacuum(1), GaussianOperator(OperatorKind::Effect, Vector::Zero(2), 0.5 * Matrix::Identity(2, 2)));
  double worst = 0.0;
  for (double phi : angle_grid(64)) worst = std::max(worst, std::abs(pqs_variance_single(pair, {0, phi}) - 0.25));
  o.require(worst <= 1e-14, "max |v - 1/4| = " + num(worst));
  return o;
}

Outcome butterfly() {
  Outcome o;
  const PqsPair blue = fig1_pair(2.5, 0.1), gray = fig1_pair(1.5, 1.0 / 6);
  struct Point {
    const PqsPair* pair;
    double phi, expected;
    const char* label;
  };
  const Point points[] = {{&blue, 0.0, 5.0 / 52, "blue min phi=0"},
                          {&blue, kPi / 2, 5.0 / 52, "blue min phi=pi/2"},
                          {&blue, kPi / 4, 0.65, "blue max phi=pi/4"},
                          {&blue, 3 * kPi / 4, 0.65, "blue max phi=3pi/4"},
                          {&gray, kPi / 4, 5.0 / 12, "gray max phi=pi/4"},
                          {&gray, 3 * kPi / 4, 5.0 / 12, "gray max phi=3pi/4"}};
  // The extremes are global over a fine grid.
  const auto curve = butterfly_curve(blue, angle_grid(720));
  double lo = 1e9, hi = -1e9;
  for (const auto& p : curve) {
    lo = std::min(lo, p.variance);
    hi = std::max(hi, p.variance);
  }
  o.require(std::abs(lo - 5.0 / 52) <= 1e-12 && std::abs(hi - 0.65) <= 1e-12, "grid extremes " + num(lo) + ", " + num(hi));

  std::uint64_t seed = 1001;
  for (const auto& pt : points) {
    const double v = pqs_variance_single(*pt.pair, {0, pt.phi});
    o.require(std::abs(v - pt.expected) <= 1e-12, std::string(pt.label) + " analytic " + num(v));
    const auto est = oracle::simulate_sequential_single(*pt.pair, {0, pt.phi}, 1'000'000, seed++);
    const auto cmp = oracle::compare_statistical(pt.label, pt.expected, est.variance, est.variance_stderr);
    o.require(cmp.passed, std::string(pt.label) + " Monte Carlo z = " + num(cmp.z_score));
  }
  return o;
}

Outcome two_mode() {
  Outcome o;
  const auto rho = make_two_mode_squeezed(2.0);
  const auto eff = make_epr_effect(-2.0);
  const double expected = 1.0 / (4 * std::cosh(2.0));
  double lo = 1e9, hi = -1e9, worst = 0.0;
  for (double phi : angle_grid(64)) {
    const double v = pqs_two_mode(rho, eff, {0, phi}).distribution.variance();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    worst = std::max(worst, std::abs(v - expected));
  }
  o.require(worst <= 1e-12, "max |v - 1/(4 cosh 2)| = " + num(worst));
  o.require(hi - lo < 1e-12, "spread " + num(hi - lo));
  const double vx = pqs_two_mode(rho, eff, {0, 0.0}).distribution.variance();
  const double vp = pqs_two_mode(rho, eff, {0, kPi / 2}).distribution.variance();
  const double product = vx * vp;
  o.require(std::abs(product - 1.0 / (16 * std::cosh(2.0) * std::cosh(2.0))) <= 1e-12, "product " + num(product));
  o.require(std::abs(product - 0.00442) < 5e-6 && violates_heisenberg(vx, vp), "product not below 1/4");
  o.require(std::abs(0.25 / product - 56.6) < 0.1, "violation factor " + num(0.25 / product));
  return o;
}

Outcome closed_form_equivalence() {
  Outcome o;
  double worst_cov = 0.0, worst_mean = 0.0;
  int count = 0;
  for (int m : {1, 2, 3, 4, 8})
    for (double z : {0.1, 1.0, 10.0})
      for (double s : {0.0, 1.0, 2.0})
        for (double sp : {0.0, -1.0, -2.0})
          for (bool displaced : {false, true}) {
            Scenario sc = Scenario::equidistant(m, z, s, sp);
            if (displaced) {
              sc.rho_means << 0.3, -0.7, 0.2, 0.5;
              sc.effect_means << -0.4, 0.1, 0.9, -0.6;
              for (int i = 0; i < 2 * m; ++i) sc.meter_means(i) = 0.1 * (i + 1) * (i % 2 ? -1 : 1);
            }
            const MeterStatistics st = retrodict_meter_stats(sc);
            worst_cov = std::max(worst_cov, (st.pi_cov - closed_form::postselected_meter_cov(sc)).cwiseAbs().maxCoeff());
            worst_mean = std::max(worst_mean, (st.pi_mean - closed_form::postselected_meter_mean(sc)).cwiseAbs().maxCoeff());
            ++count;
          }
  o.require(worst_cov <= 1e-10, "cov deviation " + num(worst_cov));
  o.require(worst_mean <= 1e-10, "mean deviation " + num(worst_mean));
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(count) + " scenarios, max cov dev " + num(worst_cov) +
              ", max mean dev " + num(worst_mean);
  return o;
}

Outcome fock_agreement() {
  Outcome o;
  const double s = 1.0;
  const int cutoff = 40;
  const auto rho = oracle::build_tmss_fock(s, cutoff);
  const auto grid = oracle::uniform_grid(-5.0, 5.0, 1001);
  const ScalarGaussian g = marginal(make_two_mode_squeezed(s), {0, 0.0});
  double linf = 0.0;
  for (double phi : {0.0, kPi / 3}) {
    const auto dens = oracle::quadrature_marginal_fock(rho, {0, phi}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) linf = std::max(linf, std::abs(dens[i] - g.density(grid[i])));
  }
  o.require(linf < 1e-6, "L-infinity " + num(linf));

  // Photon number carried by the truncated tail: sum_{j >= N} j (1 - t^2) t^{2j}.
  const double t2 = std::pow(std::tanh(0.5 * s), 2);
  double tail = 0.0;
  for (int j = cutoff; j < cutoff + 2000; ++j) tail += j * (1 - t2) * std::pow(t2, j);
  const double nbar = std::sinh(0.5 * s) * std::sinh(0.5 * s);
  const double got = oracle::mean_photon_number(rho, 0);
  o.require(std::abs(got - nbar) <= tail + 1e-14, "photon number " + num(got) + " vs " + num(nbar));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("Linf ") + num(linf) + ", |dn| " + num(std::abs(got - nbar));
  return o;
}

Outcome optimal_limit() {
  Outcome o;
  const double sigma_p = 1.0 / (4 * std::cosh(2.0));
  double prev = 1e9, last = 0.0;
  for (int m = 4; m <= 4096; m *= 2) {
    const double v = optimal_combination_variance(Scenario::equidistant(m, 1.0, 2.0, -2.0), 0);
    o.require(v < prev, "not decreasing at m=" + std::to_string(m));
    prev = last = v;
  }
  o.require(std::abs(last - sigma_p) <= 1e-3, "m=4096 variance " + num(last));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("m=4096 gap ") + num(last - sigma_p);
  return o;
}

Outcome baseline() {
  Outcome o;
  const Scenario sc = Scenario::equidistant(3, 1.0, 0.0, 0.0);
  const auto dense = predicted_meter_stats_reference(sc);
  const auto fast = predicted_meter_stats(sc);
  for (int i = 0; i < 3; ++i) {
    o.require(std::abs(closed_form::predicted_meter_variance(sc, i) - 1.1875) <= 1e-12, "closed form meter " + std::to_string(i));
    o.require(std::abs(dense.pi_cov(i, i) - 1.1875) <= 1e-12, "L sigma L^T meter " + std::to_string(i));
    o.require(std::abs(fast.pi_cov(i, i) - 1.1875) <= 1e-12, "structured kernel meter " + std::to_string(i));
  }
  for (double z : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double v = predicted_meter_stats_reference(Scenario::equidistant(1, z, 0.0, 0.0)).pi_cov(0, 0);
    o.require(std::abs(v - (0.5 / z + 0.5)) <= 1e-12, "m=1 z=" + num(z) + " gives " + num(v));
  }
  return o;
}

Outcome monte_carlo_protocol() {
  Outcome o;
  const Scenario sc = Scenario::equidistant(2, 1.0, 0.0, 0.0);
  const auto est = oracle::simulate_chain(sc, 1'000'000, 8);
  for (int i = 0; i < 2; ++i) {
    const auto c = oracle::compare_statistical("diag", 0.75, est.empirical.pi_cov(i, i), est.cov_stderr(i, i));
    o.require(c.passed, "diag " + std::to_string(i) + " z = " + num(c.z_score));
  }
  const double off = std::cos(sc.angles[0] - sc.angles[1]) / 4;
  const auto c = oracle::compare_statistical("off", off, est.empirical.pi_cov(0, 1), est.cov_stderr(0, 1));
  o.require(c.passed, "off-diagonal z = " + num(c.z_score));
  const auto again = oracle::simulate_chain(sc, 1'000'000, 8);
  o.require(again.empirical.pi_cov == est.empirical.pi_cov && again.empirical.pi_mean == est.empirical.pi_mean,
            "rerun with the same seed differs");
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("diag ") + num(est.empirical.pi_cov(0, 0)) + ", " +
              num(est.empirical.pi_cov(1, 1)) + " +- " + num(est.cov_stderr(0, 0)) + ", off " +
              num(est.empirical.pi_cov(0, 1));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {1, "coherent-pair retrodiction", 1.0, coherent_pair},
      {2, "butterfly reproduction", 30.0, butterfly},
      {3, "two-mode phi-independence and uncertainty violation", 1.0, two_mode},
      {4, "closed form vs conditioning path", 10.0, closed_form_equivalence},
      {5, "Fock-oracle agreement", 10.0, fock_agreement},
      {6, "optimal-combination limit", 5.0, optimal_limit},
      {7, "non-postselected baseline", 1.0, baseline},
      {8, "Monte Carlo protocol check", 60.0, monte_carlo_protocol},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.ok && in_time;
    failures += !pass;
    std::printf("%s [%d] %s (%.3f s, budget %.0f s)%s%s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                in_time ? "" : " over budget", o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}

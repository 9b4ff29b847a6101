#include <complex>

#include <gtest/gtest.h>
#include <omp.h>

#include "cvretro/fock.hpp"

using namespace cvretro;
using namespace cvretro::oracle;

namespace {

double gauss_linf(const FockDensityMatrix& rho, const QuadratureDirection& dir, double variance, double half) {
  const auto grid = uniform_grid(-half, half, 201);
  const auto dens = quadrature_marginal_fock(rho, dir, grid);
  const ScalarGaussian g(0.0, variance);
  double linf = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) linf = std::max(linf, std::abs(dens[i] - g.density(grid[i])));
  return linf;
}

}  // namespace

TEST(Fock, ZeroSqueezingIsVacuum) {
  const auto rho = build_tmss_fock(0.0, 5);
  EXPECT_EQ(rho.data()(0, 0), std::complex<double>(1.0, 0.0));
  EXPECT_EQ(rho.data().cwiseAbs().sum(), 1.0);
  EXPECT_EQ(rho.trace_deficiency(), 0.0);
  EXPECT_FALSE(rho.cutoff_warning());
}

TEST(Fock, TraceDeficiency) {
  const double s = 1.0;
  const auto rho = build_tmss_fock(s, 30);
  EXPECT_LT(rho.trace_deficiency(), 1e-10);
  // Geometric tail: tanh(s/2)^(2N).
  EXPECT_NEAR(build_tmss_fock(s, 10).trace_deficiency(), std::pow(std::tanh(0.5 * s), 20), 1e-15);
  EXPECT_TRUE(build_tmss_fock(3.0, 4).cutoff_warning());
  EXPECT_THROW(build_tmss_fock(1.0, 0), std::invalid_argument);
}

TEST(Fock, StateIsPhysical) {
  const auto rho = build_tmss_fock(1.0, 12);
  EXPECT_TRUE(rho.is_positive_semidefinite());
  EXPECT_LT((rho.data() - rho.data().adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Fock, ReducedStateIsThermal) {
  for (double s : {0.3, 1.0, 1.5}) {
    const auto rho = build_tmss_fock(s, kDefaultCutoff);
    const Eigen::MatrixXcd r = reduced_state(rho, 1);
    const double nbar = std::sinh(0.5 * s) * std::sinh(0.5 * s);
    EXPECT_NEAR(mean_photon_number(rho, 0), nbar, 1e-10);
    EXPECT_NEAR(mean_photon_number(rho, 1), nbar, 1e-10);
    // cov = (nbar + 1/2) I = cosh(s)/2 I.
    EXPECT_NEAR(nbar + 0.5, std::cosh(s) / 2, 1e-14);
    // Diagonal, with geometric occupation.
    EXPECT_LT((r - Eigen::MatrixXcd(r.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(r(1, 1).real() / r(0, 0).real(), nbar / (nbar + 1), 1e-12);
  }
}

TEST(Fock, HermiteFunctionsAreOrthonormal) {
  const int n = 60;
  const auto grid = uniform_grid(-14, 14, 2801);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  const double h = grid[1] - grid[0];
  for (double x : grid) {
    const Vector psi = hermite_functions(x, n);
    gram += h * psi * psi.transpose();
  }
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
  // No overflow far into the tails.
  EXPECT_TRUE(hermite_functions(30.0, 200).allFinite());
}

TEST(Fock, VacuumMarginal) {
  const auto rho = build_tmss_fock(0.0, 8);
  EXPECT_LT(gauss_linf(rho, {0, 0.0}, 0.5, 5.0), 1e-8);
  EXPECT_LT(gauss_linf(rho, {1, 1.1}, 0.5, 5.0), 1e-8);
}

TEST(Fock, SqueezedMarginalMatchesGaussian) {
  const auto rho = build_tmss_fock(1.0, kDefaultCutoff);
  for (double phi : {0.0, 0.5, kPi / 2}) EXPECT_LT(gauss_linf(rho, {0, phi}, std::cosh(1.0) / 2, 5.0), 1e-6);
}

TEST(Fock, MarginalIntegratesToCapturedWeight) {
  const double s = 1.5;
  const auto rho = build_tmss_fock(s, 20);
  const double w = default_window(s);
  const auto grid = uniform_grid(-w, w, 801);
  const auto dens = quadrature_marginal_fock(rho, {0, 0.3}, grid);
  EXPECT_NEAR(trapezoid(grid, dens), 1.0 - rho.trace_deficiency(), 1e-9);
}

TEST(Fock, ConvergesWithCutoff) {
  // L-infinity error at least halves when the cutoff doubles.
  for (double s : {1.0, 1.5}) {
    const double v = std::cosh(s) / 2;
    const double e10 = gauss_linf(build_tmss_fock(s, 10), {0, 0.0}, v, 5.0);
    const double e20 = gauss_linf(build_tmss_fock(s, 20), {0, 0.0}, v, 5.0);
    const double e40 = gauss_linf(build_tmss_fock(s, 40), {0, 0.0}, v, 5.0);
    EXPECT_LE(e20, 0.5 * e10);
    EXPECT_LE(e40, std::max(0.5 * e20, 1e-14));
  }
}

TEST(Fock, QuadratureSignConvention) {
  // (|0> + i|1>)/sqrt 2 has <x> = 0 and <p> = 1/sqrt 2, so <x_phi> = sin(phi)/sqrt 2.
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = 1 / std::sqrt(2.0);
  psi(1) = std::complex<double>(0, 1 / std::sqrt(2.0));
  const auto rho = FockDensityMatrix::from_state_vector(4, 1, psi);
  const auto grid = uniform_grid(-8, 8, 1601);
  for (double phi : {0.0, 0.4, kPi / 2, 2.0}) {
    const auto dens = quadrature_marginal_fock(rho, {0, phi}, grid);
    std::vector<double> xd(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) xd[i] = grid[i] * dens[i];
    EXPECT_NEAR(trapezoid(grid, xd), std::sin(phi) / std::sqrt(2.0), 1e-10) << phi;
  }
}

TEST(Fock, ParallelMatchesSerial) {
  omp_set_num_threads(4);
  const auto rho = build_tmss_fock(1.2, 30);
  const auto grid = uniform_grid(-6, 6, 333);
  const auto a = quadrature_marginal_fock(rho, {0, 0.7}, grid);
  const auto b = quadrature_marginal_fock_serial(rho, {0, 0.7}, grid);
  EXPECT_EQ(a, b);
}

TEST(Fock, RejectsBadInput) {
  EXPECT_THROW(FockDensityMatrix(4, 3, Eigen::MatrixXcd::Zero(64, 64), 0.0), std::invalid_argument);
  EXPECT_THROW(FockDensityMatrix(2, 1, Eigen::MatrixXcd::Identity(2, 2), 0.0), std::invalid_argument);
  Eigen::MatrixXcd nonherm = Eigen::MatrixXcd::Zero(2, 2);
  nonherm(0, 1) = 0.1;
  EXPECT_THROW(FockDensityMatrix(2, 1, nonherm, 0.0), std::invalid_argument);
  const auto rho = build_tmss_fock(0.5, 4);
  EXPECT_THROW(quadrature_marginal_fock(rho, {0, 0.0}, std::vector<double>{}), std::invalid_argument);
}

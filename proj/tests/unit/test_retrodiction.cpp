#include <random>

#include <gtest/gtest.h>

#include "cvretro/closed_form.hpp"
#include "cvretro/retrodiction.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace cvretro;

namespace {

GaussianOperator diag_op(OperatorKind kind, double vx, double vp, Eigen::Vector2d mean = {0, 0}) {
  return GaussianOperator(kind, mean, Eigen::Vector2d(vx, vp).asDiagonal().toDenseMatrix());
}

PqsPair fig1_pair(double a, double b) {
  return PqsPair(diag_op(OperatorKind::State, a, b), diag_op(OperatorKind::Effect, b, a));
}

}  // namespace

TEST(SingleMode, CoherentPairHalvesTheVariance) {
  const PqsPair pair(make_vacuum(1), GaussianOperator(OperatorKind::Effect, Vector::Zero(2), 0.5 * Matrix::Identity(2, 2)));
  for (double phi : angle_grid(64)) EXPECT_NEAR(pqs_variance_single(pair, {0, phi}), 0.25, 1e-14);
}

TEST(SingleMode, ButterflyExtremes) {
  const PqsPair blue = fig1_pair(2.5, 0.1);
  EXPECT_NEAR(pqs_variance_single(blue, {0, 0.0}), 5.0 / 52, 1e-12);
  EXPECT_NEAR(pqs_variance_single(blue, {0, kPi / 2}), 5.0 / 52, 1e-12);
  EXPECT_NEAR(pqs_variance_single(blue, {0, kPi / 4}), 0.65, 1e-12);
  EXPECT_NEAR(pqs_variance_single(blue, {0, 3 * kPi / 4}), 0.65, 1e-12);

  const PqsPair gray = fig1_pair(1.5, 1.0 / 6);
  EXPECT_NEAR(pqs_variance_single(gray, {0, kPi / 4}), 5.0 / 12, 1e-12);
}

TEST(SingleMode, ButterflyCurveShape) {
  const auto curve = butterfly_curve(fig1_pair(2.5, 0.1), angle_grid(8));
  ASSERT_EQ(curve.size(), 8u);
  EXPECT_NEAR(curve[0].variance, 5.0 / 52, 1e-12);
  EXPECT_NEAR(curve[1].variance, 0.65, 1e-12);
  EXPECT_THROW(butterfly_curve(fig1_pair(2.5, 0.1), std::vector<double>{}), std::invalid_argument);
}

TEST(SingleMode, MatchesWignerQuadrature) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const PqsPair pair(gen::random_state(rng, 1), gen::random_effect(rng, 1));
    const double phi = gen::uniform(rng, 0, kPi);
    const auto r = pqs_distribution_single(pair, {0, phi});
    const auto ref = oracle_test::pqs_single_by_quadrature(pair.rho(), pair.effect(), phi, 301);
    EXPECT_NEAR(r.distribution.mean(), ref.mean(0), 1e-9);
    EXPECT_NEAR(r.distribution.variance(), ref.cov(0, 0), 1e-9 * ref.cov(0, 0));
  }
}

TEST(SingleMode, Properties) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rho = gen::random_state(rng, 1, 1.0);
    const auto eff = gen::random_effect(rng, 1, 1.0);
    const QuadratureDirection dir{0, gen::uniform(rng, 0, 2 * kPi)};
    const PqsPair pair(rho, eff);
    const double v = pqs_variance_single(pair, dir);
    // Bounded by both prior and posterior information.
    EXPECT_LE(v, rotated_variance(rho, dir) * (1 + 1e-12));
    EXPECT_LE(v, rotated_variance(eff, dir) * (1 + 1e-12));
    // phi and phi + pi describe the same axis.
    EXPECT_NEAR(v, pqs_variance_single(pair, {0, dir.phi + kPi}), 1e-12 * v);
    // Symmetric in the roles of rho and E when both are admissible states.
    const PqsPair swapped(GaussianOperator(OperatorKind::State, eff.mean(), eff.cov()),
                          GaussianOperator(OperatorKind::Effect, rho.mean(), rho.cov()));
    EXPECT_NEAR(v, pqs_variance_single(swapped, dir), 1e-12 * v);
  }
}

TEST(SingleMode, PairRequiresMatchingKinds) {
  EXPECT_THROW(PqsPair(make_vacuum(1), make_vacuum(1)), std::invalid_argument);
  EXPECT_THROW(PqsPair(make_vacuum(1), GaussianOperator(OperatorKind::Effect, Vector::Zero(4), Matrix::Identity(4, 4))),
               std::invalid_argument);
  const auto unphysical = diag_op(OperatorKind::State, 0.1, 0.1);
  EXPECT_THROW(PqsPair(unphysical, diag_op(OperatorKind::Effect, 1, 1)), std::invalid_argument);
}

TEST(TwoMode, PhiIndependenceAndUncertaintyViolation) {
  const auto rho = make_two_mode_squeezed(2.0);
  const auto eff = make_epr_effect(-2.0);
  const double expected = 1.0 / (4 * std::cosh(2.0));
  double lo = 1e9, hi = -1e9;
  for (double phi : angle_grid(64)) {
    const double v = pqs_two_mode(rho, eff, {0, phi}).distribution.variance();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    EXPECT_NEAR(v, expected, 1e-12);
  }
  EXPECT_LT(hi - lo, 1e-12);
  EXPECT_NEAR(expected, 0.06645, 1e-5);
  EXPECT_TRUE(violates_heisenberg(lo, hi));
  EXPECT_NEAR(0.25 / (expected * expected), 56.6, 0.1);
}

TEST(TwoMode, MatchesFockOracle) {
  for (auto [s, sp] : {std::pair{1.0, -1.0}, {2.0, -2.0}, {1.0, 0.5}, {0.5, -1.5}}) {
    const auto ref = oracle_test::tmss_pqs_by_fock(s, sp, 80, 801, 8.0);
    const auto r = pqs_two_mode(make_two_mode_squeezed(s), make_epr_effect(sp), {0, 0.4});
    EXPECT_NEAR(r.distribution.variance(), ref.cov(0, 0), 1e-10) << s << " " << sp;
    EXPECT_NEAR(r.distribution.variance(), closed_form::tmss_pqs_variance(s, sp), 1e-13);
    EXPECT_NEAR(r.distribution.mean(), 0.0, 1e-14);
  }
}

TEST(TwoMode, DisplacedMeansMatchClosedForm) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const double s = gen::uniform(rng, 0, 2), sp = gen::uniform(rng, -2, 1), phi = gen::uniform(rng, 0, 2 * kPi);
    Eigen::Vector4d rm, em;
    for (int i = 0; i < 4; ++i) {
      rm(i) = gen::uniform(rng, -1, 1);
      em(i) = gen::uniform(rng, -1, 1);
    }
    const auto r = pqs_two_mode(make_two_mode_squeezed(s).with_mean(Vector(rm)), make_epr_effect(sp, em), {0, phi});
    EXPECT_NEAR(r.distribution.mean(), closed_form::tmss_pqs_mean(s, sp, rm, em, phi), 1e-12);
    EXPECT_NEAR(r.distribution.variance(), closed_form::tmss_pqs_variance(s, sp), 1e-12);
  }
}

TEST(TwoMode, ExactRouteAgreesWithCombinedProjectionOnStandardFamily) {
  for (double phi : {0.0, 0.9}) {
    const PqsPair pair(make_two_mode_squeezed(1.2), make_epr_effect(-0.7));
    const auto a = pqs_projective(pair, {0, phi}).distribution;
    const auto b = combined_gaussian_projection(pair, {0, phi});
    EXPECT_NEAR(a.variance(), b.variance(), 1e-12);
  }
}

TEST(TwoMode, ExactRouteMatchesSlicewiseIntegration) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 3; ++trial) {
    const auto rho = gen::random_state(rng, 2, 0.4);
    const auto eff = gen::random_effect(rng, 2, 0.4);
    const double phi = gen::uniform(rng, 0, kPi);
    const auto exact = pqs_projective(PqsPair(rho, eff), {0, phi}).distribution;

    // p(x) = Tr[<x|rho|x> <x|E|x>]. Each slice is a Gaussian operator on mode 1
    // (mass times a normal Wigner function), so the trace is the overlap
    // mass_r mass_e N(mean_r - mean_e; cov_r + cov_e), integrated here over x.
    const Eigen::Vector2d u(std::cos(phi), std::sin(phi));
    auto slice = [&](const GaussianOperator& op, double x) {
      // Marginalize the conjugate quadrature, then condition on x_phi = x.
      Matrix rot = Matrix::Identity(4, 4);
      rot.block(0, 0, 2, 2) << u(0), u(1), -u(1), u(0);
      const Vector m = rot * op.mean();
      const Matrix c = rot * op.cov() * rot.transpose();
      const double vx = c(0, 0);
      const Eigen::Vector2d cx = c.block(2, 0, 2, 1);
      const Eigen::Vector2d mean = m.tail(2) + cx * (x - m(0)) / vx;
      const Eigen::Matrix2d cov = c.block(2, 2, 2, 2) - cx * cx.transpose() / vx;
      const double mass = std::exp(-0.5 * (x - m(0)) * (x - m(0)) / vx) / std::sqrt(2 * kPi * vx);
      return std::tuple{mass, mean, cov};
    };
    const auto density = [&](double x) {
      const auto [mr, ar, cr] = slice(rho, x);
      const auto [me, ae, ce] = slice(eff, x);
      const Eigen::Matrix2d c = cr + ce;
      const Eigen::Vector2d d = ar - ae;
      return mr * me * std::exp(-0.5 * d.dot(c.inverse() * d)) / (2 * kPi * std::sqrt(c.determinant()));
    };
    const oracle_test::Axis xs(exact.mean(), 12 * std::sqrt(exact.variance()), 801);
    double mass = 0, s1 = 0, s2 = 0;
    for (std::size_t i = 0; i < xs.x.size(); ++i) {
      const double p = xs.w[i] * density(xs.x[i]);
      mass += p;
      s1 += p * xs.x[i];
      s2 += p * xs.x[i] * xs.x[i];
    }
    EXPECT_NEAR(exact.mean(), s1 / mass, 1e-9);
    EXPECT_NEAR(exact.variance(), s2 / mass - (s1 / mass) * (s1 / mass), 1e-9);
  }
}

TEST(Heterodyne, MatchesHusimiQuadrature) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 2; ++trial) {
    const PqsPair pair(gen::random_state(rng, 1, 0.4), gen::random_effect(rng, 1, 0.4));
    const auto h = heterodyne_retrodiction(pair);
    const auto ref = oracle_test::heterodyne_by_quadrature(pair.rho(), pair.effect(), 61, 41);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(h.mean(i), ref.mean(i), 1e-7);
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(h.cov(i, j), ref.cov(i, j), 1e-7);
    }
  }
}

TEST(Heterodyne, CoherentPair) {
  const PqsPair pair(make_coherent(Eigen::Vector2d(1.0, 0.0)),
                     GaussianOperator(OperatorKind::Effect, Eigen::Vector2d(-1.0, 0.0), 0.5 * Matrix::Identity(2, 2)));
  const auto h = heterodyne_retrodiction(pair);
  EXPECT_NEAR(h.cov(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(h.mean(0), 0.0, 1e-15);
}

TEST(AngleGrid, Spacing) {
  const auto g = angle_grid(4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g[1], kPi / 2, 1e-15);
  EXPECT_THROW(angle_grid(0), std::invalid_argument);
}

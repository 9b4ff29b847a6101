#include "cvretro/meter_kernels.hpp"

namespace cvretro::kernels {

namespace {

GaussianMoments fill_moments(const Scenario& sc, bool parallel) {
  sc.validate();
  const int m = sc.m;
  const int dim = m + 4;
  const double z = sc.z;

  Vector c(m), s(m);
  for (int k = 0; k < m; ++k) {
    c(k) = std::cos(sc.angles[k]);
    s(k) = std::sin(sc.angles[k]);
  }
  const double scc = c.squaredNorm();
  const double sss = s.squaredNorm();
  const double ssc = s.dot(c);

  const GaussianOperator rho = sc.system_state();
  const Matrix& sig = rho.cov();
  const Vector& rbar = rho.mean();
  const auto qbar = sc.meter_means.head(m);
  const auto pibar = sc.meter_means.tail(m);
  const double cq = c.dot(qbar);
  const double sq = s.dot(qbar);

  GaussianMoments out;
  out.mean.resize(dim);
  out.cov.resize(dim, dim);
  Matrix& cov = out.cov;

#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < m; ++i) {
    const double ci = c(i), si = s(i);
    out.mean(i) = pibar(i) + ci * rbar(0) + si * rbar(1) + 0.5 * (si * cq - ci * sq);
    for (int j = 0; j < m; ++j) {
      const double cj = c(j), sj = s(j);
      const double system = ci * cj * sig(0, 0) + (ci * sj + si * cj) * sig(0, 1) + si * sj * sig(1, 1);
      const double ccT = si * sj * scc - (si * cj + ci * sj) * ssc + ci * cj * sss;
      cov(i, j) = system + 0.125 * z * ccT + (i == j ? 0.5 / z : 0.0);
    }
    for (int t = 0; t < 4; ++t) cov(i, m + t) = ci * sig(0, t) + si * sig(1, t);
    cov(i, m) += -0.25 * z * (si * ssc - ci * sss);
    cov(i, m + 1) += 0.25 * z * (si * scc - ci * ssc);
    for (int t = 0; t < 4; ++t) cov(m + t, i) = cov(i, m + t);
  }

  cov.bottomRightCorner<4, 4>() = sig;
  cov(m, m) += 0.5 * z * sss;
  cov(m, m + 1) -= 0.5 * z * ssc;
  cov(m + 1, m) -= 0.5 * z * ssc;
  cov(m + 1, m + 1) += 0.5 * z * scc;

  out.mean.tail<4>() = rbar;
  out.mean(m) -= sq;
  out.mean(m + 1) += cq;
  return out;
}

}  // namespace

GaussianMoments meter_system_moments(const Scenario& scenario) { return fill_moments(scenario, true); }

GaussianMoments meter_system_moments_serial(const Scenario& scenario) { return fill_moments(scenario, false); }

}  // namespace cvretro::kernels

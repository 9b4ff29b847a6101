#include "cvretro/scenario.hpp"

#include <complex>
#include <stdexcept>

namespace cvretro {

Scenario Scenario::equidistant(int m, double z, double s, double s_prime, AngleSpan span) {
  if (m < 1) throw std::invalid_argument("scenario needs at least one meter");
  Scenario sc;
  sc.m = m;
  sc.z = z;
  sc.s = s;
  sc.s_prime = s_prime;
  const double range = span == AngleSpan::Full ? 2.0 * kPi : kPi;
  sc.angles.resize(m);
  for (int j = 0; j < m; ++j) sc.angles[j] = range * j / m;
  sc.meter_means = Vector::Zero(2 * m);
  sc.validate();
  return sc;
}

void Scenario::validate() const {
  if (m < 1) throw std::invalid_argument("scenario: m must be >= 1");
  if (static_cast<int>(angles.size()) != m) throw std::invalid_argument("scenario: angles must have m entries");
  if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument("scenario: z must be positive and finite");
  if (!std::isfinite(s) || !std::isfinite(s_prime)) throw std::invalid_argument("scenario: s, s_prime must be finite");
  for (double a : angles)
    if (!std::isfinite(a)) throw std::invalid_argument("scenario: angles must be finite");
  if (meter_means.size() != 2 * m) throw std::invalid_argument("scenario: meter_means must have 2m entries");
  if (!rho_means.allFinite() || !effect_means.allFinite() || !meter_means.allFinite())
    throw std::invalid_argument("scenario: means must be finite");
}

GaussianOperator Scenario::system_state() const {
  return make_two_mode_squeezed(s).with_mean(Vector(rho_means));
}

GaussianOperator Scenario::system_effect() const { return make_epr_effect(s_prime, effect_means); }

bool Scenario::has_balanced_angles(double tol) const {
  std::complex<double> sum = 0.0;
  for (double a : angles) sum += std::polar(1.0, 2.0 * a);
  return std::abs(sum) <= tol * m;
}

CommutatorMatrix CommutatorMatrix::from_angles(const std::vector<double>& angles) {
  const auto m = static_cast<Eigen::Index>(angles.size());
  Matrix c(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) c(i, j) = i == j ? 0.0 : std::sin(angles[i] - angles[j]);
  return {c};
}

}  // namespace cvretro

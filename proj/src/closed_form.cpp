#include "cvretro/closed_form.hpp"

#include <stdexcept>

namespace cvretro::closed_form {

double tmss_pqs_variance(double s, double s_prime) {
  return (std::cosh(s) + std::cosh(s_prime)) / (4.0 * (1.0 + std::cosh(s - s_prime)));
}

double tmss_pqs_mean(double s, double s_prime, const Eigen::Vector4d& rho_means,
                     const Eigen::Vector4d& effect_means, double phi) {
  const double c = std::cos(phi), sn = std::sin(phi);
  const double x2 = effect_means(2) - rho_means(2);
  const double p2 = effect_means(3) - rho_means(3);
  const double d = s - s_prime;
  return c * 0.5 * (rho_means(0) + effect_means(0)) + sn * 0.5 * (rho_means(1) + effect_means(1)) +
         std::sinh(d) / (2.0 * (1.0 + std::cosh(d))) * (c * x2 - sn * p2);
}

double predicted_meter_variance(const Scenario& sc, int i) {
  sc.validate();
  if (i < 0 || i >= sc.m) throw std::invalid_argument("meter index out of range");
  double sum = 0.0;
  for (int j = 0; j < sc.m; ++j) {
    const double sj = std::sin(sc.angles[i] - sc.angles[j]);
    sum += sj * sj;
  }
  return 0.5 / sc.z + sc.z * sum / 8.0 + 0.5 * std::cosh(sc.s);
}

Matrix postselected_meter_cov(const Scenario& sc) {
  sc.validate();
  const double sigma_p = tmss_pqs_variance(sc.s, sc.s_prime);
  Matrix cov(sc.m, sc.m);
  for (int i = 0; i < sc.m; ++i)
    for (int j = 0; j < sc.m; ++j)
      cov(i, j) = (i == j ? 0.5 / sc.z + sigma_p : std::cos(sc.angles[i] - sc.angles[j]) * sigma_p);
  return cov;
}

Vector postselected_meter_mean(const Scenario& sc) {
  sc.validate();
  Vector mean(sc.m);
  for (int i = 0; i < sc.m; ++i)
    mean(i) = sc.meter_means(sc.m + i) +
              tmss_pqs_mean(sc.s, sc.s_prime, sc.rho_means, sc.effect_means, sc.angles[i]);
  return mean;
}

double optimal_combination_variance(int m, double z, double s, double s_prime) {
  return 1.0 / (m * z) + tmss_pqs_variance(s, s_prime);
}

}  // namespace cvretro::closed_form

#pragma once

// Closed-form results for the standard family: two-mode squeezed state
// (s), EPR effect (s_prime), equidistant meters. The general code paths never
// call these; they exist to check those paths.

#include "cvretro/scenario.hpp"

namespace cvretro::closed_form {

/// Retrodicted x_phi variance for the standard pair, independent of phi.
double tmss_pqs_variance(double s, double s_prime);

/// Retrodicted x_phi mean for the standard pair with displaced means.
double tmss_pqs_mean(double s, double s_prime, const Eigen::Vector4d& rho_means,
                     const Eigen::Vector4d& effect_means, double phi);

/// Non-postselected variance of meter i, with the sin^2 sum evaluated term by term.
double predicted_meter_variance(const Scenario& scenario, int i);

/// Postselected meter covariance: delta_ij/(2z) + cos(phi_i - phi_j) sigma_P.
Matrix postselected_meter_cov(const Scenario& scenario);

/// Postselected meter means: pibar_i + retrodicted mean of x_phi_i.
Vector postselected_meter_mean(const Scenario& scenario);

/// 1/(m z) + sigma_P.
double optimal_combination_variance(int m, double z, double s, double s_prime);

}  // namespace cvretro::closed_form

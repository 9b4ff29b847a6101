#pragma once

// Joint measurement of m non-commuting quadratures of mode 1 through a bank
// of m meters, read out either directly or after a final EPR measurement.

#include <optional>

#include "cvretro/gaussian.hpp"
#include "cvretro/scenario.hpp"

namespace cvretro {

/// Heisenberg map of the impulsive coupling H = -delta(t) sum_i q_i x_phi_i,
/// in blocked layout (q_1..q_m, pi_1..pi_m, x1, p1, x2, p2):
///   q  -> q
///   pi -> pi + x_phi + C q / 2
///   x1 -> x1 - sum_i sin(phi_i) q_i
///   p1 -> p1 + sum_i cos(phi_i) q_i
LinearPhaseSpaceMap build_transform(const Scenario& scenario);

/// Meter readout statistics without postselection.
MeterStatistics predicted_meter_stats(const Scenario& scenario);

/// Meter readout statistics conditioned on the final EPR effect.
MeterStatistics retrodict_meter_stats(const Scenario& scenario);

/// Same quantities through the dense pipeline: interleaved joint state of all
/// 2m+4 quadratures, apply_linear_map, condition_on_effect. O(m^3); intended
/// for cross-checking small scenarios.
MeterStatistics predicted_meter_stats_reference(const Scenario& scenario);
MeterStatistics retrodict_meter_stats_reference(const Scenario& scenario);

/// Minimize d^T pi_cov d subject to
///   sum_i d_i cos(phi_i - target) = 1,  sum_i d_i sin(phi_i - target) = 0.
/// Redundant constraints are dropped; inconsistent ones throw InfeasibleConstraints.
Vector constrained_min_variance_weights(const Matrix& pi_cov, const std::vector<double>& angles, double target);

/// Weights d^(k) recombining the postselected meter readouts into an estimate of x_phi_k.
///
/// Balanced angle sets (see Scenario::has_balanced_angles) use d_i = (2/m) cos(phi_i - phi_k);
/// otherwise the constrained quadratic program is solved.
Vector optimal_weights(const Scenario& scenario, int k);

struct CombinationResult {
  Vector weights;
  /// d^T sigma'_{pi|S} d.
  double variance = 0.0;
  /// 1/(m z) + sigma_P, reported when the closed-form weights apply.
  std::optional<double> closed_form;
  bool closed_form_weights = false;
};

CombinationResult optimal_combination(const Scenario& scenario, int k);

double optimal_combination_variance(const Scenario& scenario, int k);

}  // namespace cvretro

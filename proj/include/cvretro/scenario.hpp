#pragma once

#include <vector>

#include "cvretro/gaussian.hpp"

namespace cvretro {

/// Equidistant meter angles over 2*pi (phi_j = 2 pi j / m) or over pi.
enum class AngleSpan { Full, Half };

/// An m-meter joint measurement on mode 1 of an EPR pair.
///
/// The system is the two-mode squeezed state with parameter s, displaced by
/// rho_means; the final EPR measurement is the effect make_epr_effect(s_prime,
/// effect_means). Meter i starts in cov diag(z/2, 1/(2z)). meter_means uses
/// the blocked layout (q_1..q_m, pi_1..pi_m).
struct Scenario {
  int m = 1;
  double z = 1.0;
  double s = 0.0;
  double s_prime = 0.0;
  std::vector<double> angles{0.0};
  Eigen::Vector4d rho_means = Eigen::Vector4d::Zero();
  Eigen::Vector4d effect_means = Eigen::Vector4d::Zero();
  Vector meter_means = Vector::Zero(2);

  /// Zero-mean scenario with equidistant angles.
  static Scenario equidistant(int m, double z, double s, double s_prime, AngleSpan span = AngleSpan::Full);

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  GaussianOperator system_state() const;
  GaussianOperator system_effect() const;
  PhaseSpaceOrdering ordering() const { return PhaseSpaceOrdering::blocked(m, 2); }

  /// True when sum_j exp(2 i phi_j) vanishes, the condition under which the
  /// cos-weighted recombination satisfies its constraints exactly.
  bool has_balanced_angles(double tol = 1e-9) const;
};

/// C_ij = i[x_phi_i, x_phi_j] = sin(phi_i - phi_j).
struct CommutatorMatrix {
  Matrix matrix;

  static CommutatorMatrix from_angles(const std::vector<double>& angles);
};

/// Gaussian statistics of the meter momentum readouts pi_1..pi_m.
struct MeterStatistics {
  Vector pi_mean;
  Matrix pi_cov;
  bool postselected = false;
};

}  // namespace cvretro

#pragma once

// Phase-space representation of Gaussian states and effects.
//
// Conventions: hbar = 1, vacuum variance 1/2, quadratures interleaved per
// mode as (x_1, p_1, x_2, p_2, ...). Effects are stored unnormalized: only
// their first and second moments are kept.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvretro/errors.hpp"

namespace cvretro {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Default width of a regularized projective homodyne effect.
inline constexpr double kDefaultProjectiveEps = 1e-8;

/// Reciprocal condition number below which a conditioning solve is refused.
inline constexpr double kSingularityRcond = 1e-13;

enum class OperatorKind { State, Effect };

std::string to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(const std::string& text);

/// The observable x_phi = x cos(phi) + p sin(phi) of one mode.
///
/// phi and phi + pi name the same axis; x_{phi+pi} = -x_phi.
struct QuadratureDirection {
  int mode = 0;
  double phi = 0.0;

  Eigen::Vector2d unit() const { return {std::cos(phi), std::sin(phi)}; }
};

/// One-dimensional outcome distribution N(mean, variance).
class ScalarGaussian {
 public:
  ScalarGaussian(double mean, double variance);

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double density(double x) const;

 private:
  double mean_;
  double variance_;
};

/// Mean vector and covariance matrix over an arbitrary list of quadratures.
struct GaussianMoments {
  Vector mean;
  Matrix cov;
};

/// A Gaussian density matrix or effect on n modes.
///
/// Construction checks structure only (sizes, finiteness, symmetry to 1e-12
/// relative). Physical admissibility is reported by validate() and enforced
/// where a state must be physical, e.g. PqsPair.
class GaussianOperator {
 public:
  GaussianOperator(OperatorKind kind, Vector mean, Matrix cov);

  int n_modes() const { return static_cast<int>(mean_.size() / 2); }
  OperatorKind kind() const { return kind_; }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

  Eigen::Vector2d mode_mean(int mode) const;
  Eigen::Matrix2d mode_cov(int mode) const;

  GaussianOperator with_mean(Vector mean) const;

 private:
  OperatorKind kind_;
  Vector mean_;
  Matrix cov_;
};

/// Antisymmetric form Omega with iOmega = [r, r^T], interleaved ordering.
struct SymplecticForm {
  int n_modes;
  Matrix matrix;

  static SymplecticForm interleaved(int n_modes);
};

/// Quadrature layout of a phase-space vector.
///
/// Interleaved: every mode contributes (x, p) in turn.
/// Blocked: (q_1..q_m, pi_1..pi_m) for `meter_modes` meters, followed by the
/// `system_modes` system modes interleaved. This is the layout the meter-bank
/// equations are written in.
struct PhaseSpaceOrdering {
  enum class Layout { Interleaved, Blocked };

  Layout layout = Layout::Interleaved;
  int meter_modes = 0;
  int system_modes = 0;

  int n_modes() const { return meter_modes + system_modes; }
  int dimension() const { return 2 * n_modes(); }

  static PhaseSpaceOrdering interleaved(int n_modes) { return {Layout::Interleaved, 0, n_modes}; }
  static PhaseSpaceOrdering blocked(int meters, int system) { return {Layout::Blocked, meters, system}; }
};

/// Permutation P with r_interleaved = P * r_blocked (meters first, then the system).
Eigen::PermutationMatrix<Eigen::Dynamic> blocked_to_interleaved(int meter_modes, int system_modes);

/// Symplectic form expressed in the given layout.
Matrix symplectic_form(const PhaseSpaceOrdering& ordering);

/// Heisenberg-picture linear map r' = L r.
class LinearPhaseSpaceMap {
 public:
  LinearPhaseSpaceMap(Matrix matrix, PhaseSpaceOrdering ordering);

  const Matrix& matrix() const { return matrix_; }
  const PhaseSpaceOrdering& ordering() const { return ordering_; }

  /// Largest entry of |L Omega L^T - Omega|.
  double symplectic_defect() const;
  bool is_symplectic(double tol = 1e-10) const { return symplectic_defect() <= tol; }

  LinearPhaseSpaceMap to_interleaved() const;

  static LinearPhaseSpaceMap identity(int n_modes);
  /// Phase rotation of one mode: x_phi becomes the new x.
  static LinearPhaseSpaceMap rotation(int n_modes, int mode, double theta);

 private:
  Matrix matrix_;
  PhaseSpaceOrdering ordering_;
};

GaussianOperator make_vacuum(int n_modes);

/// Vacuum displaced to `mean` (length 2n).
GaussianOperator make_coherent(const Vector& mean);

/// Two-mode squeezed vacuum; s > 0 squeezes x1 - x2 and p1 + p2.
GaussianOperator make_two_mode_squeezed(double s);

/// Effect of an EPR measurement with strength s_prime and outcome displacement.
///
/// Same covariance form as make_two_mode_squeezed(s_prime); with s_prime < 0 the
/// effect is sharp in x1 + x2 and p1 - p2.
GaussianOperator make_epr_effect(double s_prime, const Eigen::Vector4d& means = Eigen::Vector4d::Zero());

/// Single-mode effect approximating the projector |x_phi = outcome><x_phi|:
/// variance eps along u = (cos phi, sin phi) and 1/eps along the conjugate axis.
GaussianOperator make_homodyne_effect(double phi, double outcome, double eps = kDefaultProjectiveEps);

/// u^T sigma u for the 2x2 block of dir.mode.
double rotated_variance(const GaussianOperator& op, const QuadratureDirection& dir);

/// Distribution of x_phi: the marginal of the Wigner function along dir.
ScalarGaussian marginal(const GaussianOperator& op, const QuadratureDirection& dir);

GaussianOperator apply_linear_map(const GaussianOperator& op, const LinearPhaseSpaceMap& map);

/// Condition quadratures `cond` on a Gaussian effect and keep `keep`:
///   cov  = S_kk - S_kc (S_cc + S_E)^-1 S_kc^T
///   mean = r_k + S_kc (S_cc + S_E)^-1 (r_E - r_c)
/// Throws NumericalSingularity when S_cc + S_E is not safely positive definite.
GaussianMoments condition_moments(const Vector& mean, const Matrix& cov, std::span<const int> keep,
                                  std::span<const int> cond, const Vector& effect_mean,
                                  const Matrix& effect_cov);

/// Tr_B[rho E_B] for a Gaussian state rho and an effect acting on modes `part_b`
/// (in the order the effect's modes are listed). Returns the unnormalized state
/// on the remaining modes, in increasing mode order.
GaussianOperator condition_on_effect(const GaussianOperator& joint, std::span<const int> part_b,
                                     const GaussianOperator& effect_b);

/// Symplectic eigenvalues in ascending order. Requires a positive definite cov.
Vector symplectic_eigenvalues(const Matrix& cov);

struct ValidationReport {
  OperatorKind kind = OperatorKind::State;
  double symmetry_defect = 0.0;
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  /// NaN when the covariance is not positive definite.
  double min_symplectic_eigenvalue = 0.0;
  /// Smallest eigenvalue of cov + (i/2) Omega.
  double heisenberg_margin = 0.0;
  bool admissible = false;
  std::vector<std::string> issues;
};

/// Diagnostic report; never throws and never modifies its input.
ValidationReport validate(const GaussianOperator& op, double tol = 1e-10);

/// Throws std::invalid_argument when `op` is a state violating the uncertainty
/// principle, or an effect without a positive definite covariance.
void require_admissible(const GaussianOperator& op, const std::string& what, double tol = 1e-10);

}  // namespace cvretro

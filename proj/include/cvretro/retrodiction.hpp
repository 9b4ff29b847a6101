#pragma once

// Past-quantum-state retrodiction of quadrature outcomes for Gaussian (rho, E).

#include <span>
#include <vector>

#include "cvretro/gaussian.hpp"

namespace cvretro {

/// Prior state and posterior effect of the same system.
class PqsPair {
 public:
  /// Throws std::invalid_argument on kind/mode mismatch or an inadmissible rho.
  PqsPair(GaussianOperator rho, GaussianOperator effect);

  const GaussianOperator& rho() const { return rho_; }
  const GaussianOperator& effect() const { return effect_; }
  int n_modes() const { return rho_.n_modes(); }

 private:
  GaussianOperator rho_;
  GaussianOperator effect_;
};

enum class Provenance { SingleMode, TwoModeEPR, Heterodyne };

const char* to_string(Provenance p);

struct RetrodictionResult {
  ScalarGaussian distribution;
  QuadratureDirection direction;
  Provenance provenance;
};

/// (1/sigma_rho,phi + 1/sigma_E,phi)^-1 for a single-mode pair.
double pqs_variance_single(const PqsPair& pair, const QuadratureDirection& dir);

/// Normalized product of the rho and E marginals along dir.
RetrodictionResult pqs_distribution_single(const PqsPair& pair, const QuadratureDirection& dir);

/// Outcome distribution of a projective x_phi measurement on mode dir.mode of
/// an n-mode pair, Tr_rest[<x|rho|x><x|E|x>] normalized.
///
/// Both Wigner functions are first marginalized over the conjugate quadrature
/// of the measured mode; the remaining Gaussians are then multiplied. For one
/// mode this is pqs_distribution_single.
RetrodictionResult pqs_projective(const PqsPair& pair, const QuadratureDirection& dir);

/// EPR-assisted retrodiction of x_phi on mode 0 of a two-mode pair.
RetrodictionResult pqs_two_mode(const GaussianOperator& rho2, const GaussianOperator& effect2,
                                const QuadratureDirection& dir);

/// u^T (S_rho^-1 + S_E^-1)^-1 u and the matching precision-weighted mean,
/// projected onto dir. Coincides with pqs_projective for the two-mode squeezed
/// state/effect family but not for general Gaussians.
ScalarGaussian combined_gaussian_projection(const PqsPair& pair, const QuadratureDirection& dir);

struct HeterodyneEstimate {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

/// Product of the two Husimi functions (covariance sigma + I/2 each).
HeterodyneEstimate heterodyne_retrodiction(const PqsPair& pair);

struct ButterflyPoint {
  double phi;
  double variance;
};

/// pqs_variance_single over an angle grid. Throws on an empty grid.
std::vector<ButterflyPoint> butterfly_curve(const PqsPair& pair, std::span<const double> phi_grid);

/// n angles 0, span/n, ..., (n-1) span/n.
std::vector<double> angle_grid(int n, double span = 2.0 * kPi);

/// True when var_x * var_p drops below the 1/4 bound of the uncertainty relation.
inline bool violates_heisenberg(double var_x, double var_p) { return var_x * var_p < 0.25; }

}  // namespace cvretro

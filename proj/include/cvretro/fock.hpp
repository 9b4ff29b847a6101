#pragma once

// Truncated Fock-space oracle: density matrices in the number basis and their
// quadrature marginals through harmonic-oscillator wavefunctions.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cvretro/gaussian.hpp"

namespace cvretro::oracle {

inline constexpr int kDefaultCutoff = 40;

/// Density matrix on one or two modes truncated to photon numbers < cutoff.
/// Two-mode basis index of |j, k> is j * cutoff + k.
class FockDensityMatrix {
 public:
  /// Checks hermiticity and trace <= 1.
  FockDensityMatrix(int cutoff, int n_modes, Eigen::MatrixXcd data, double trace_deficiency);

  int cutoff() const { return cutoff_; }
  int n_modes() const { return n_modes_; }
  const Eigen::MatrixXcd& data() const { return data_; }
  /// 1 - (weight captured below the cutoff).
  double trace_deficiency() const { return trace_deficiency_; }
  /// Set when more than 1% of the weight lies above the cutoff.
  bool cutoff_warning() const { return trace_deficiency_ > 0.01; }

  /// Smallest eigenvalue >= -tol. Costs a full Hermitian eigendecomposition.
  bool is_positive_semidefinite(double tol = 1e-10) const;

  /// Pure state |psi><psi| from number-basis amplitudes; deficiency is 1 - |psi|^2.
  static FockDensityMatrix from_state_vector(int cutoff, int n_modes, const Eigen::VectorXcd& psi);

 private:
  int cutoff_;
  int n_modes_;
  Eigen::MatrixXcd data_;
  double trace_deficiency_;
};

/// Truncated two-mode squeezed vacuum, amplitudes tanh(s/2)^j / cosh(s/2) on |j, j>.
FockDensityMatrix build_tmss_fock(double s, int cutoff = kDefaultCutoff);

/// Partial trace onto one mode (cutoff x cutoff).
Eigen::MatrixXcd reduced_state(const FockDensityMatrix& rho, int mode);

double mean_photon_number(const FockDensityMatrix& rho, int mode);

/// Harmonic-oscillator eigenfunctions psi_0(x)..psi_{count-1}(x) via the
/// normalized three-term recurrence, stable well beyond n = 30.
Vector hermite_functions(double x, int count);

/// <x_phi| rho_mode |x_phi> on each grid point. OpenMP-parallel over the grid.
std::vector<double> quadrature_marginal_fock(const FockDensityMatrix& rho, const QuadratureDirection& dir,
                                             std::span<const double> grid);

/// Single-threaded reference of quadrature_marginal_fock.
std::vector<double> quadrature_marginal_fock_serial(const FockDensityMatrix& rho, const QuadratureDirection& dir,
                                                    std::span<const double> grid);

/// Default grid half-width 6 sqrt(cosh s).
inline double default_window(double s) { return 6.0 * std::sqrt(std::cosh(s)); }

/// n evenly spaced points covering [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, int n);

/// Trapezoid rule on a (possibly non-uniform) grid.
double trapezoid(std::span<const double> grid, std::span<const double> values);

}  // namespace cvretro::oracle

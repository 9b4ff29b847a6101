#include "cvretro/fock.hpp"

#include <complex>
#include <stdexcept>

namespace cvretro::oracle {

FockDensityMatrix::FockDensityMatrix(int cutoff, int n_modes, Eigen::MatrixXcd data, double trace_deficiency)
    : cutoff_(cutoff), n_modes_(n_modes), data_(std::move(data)), trace_deficiency_(trace_deficiency) {
  if (cutoff < 1) throw std::invalid_argument("Fock cutoff must be >= 1");
  if (n_modes != 1 && n_modes != 2) throw std::invalid_argument("Fock oracle supports one or two modes");
  const Eigen::Index dim = n_modes == 1 ? cutoff : static_cast<Eigen::Index>(cutoff) * cutoff;
  if (data_.rows() != dim || data_.cols() != dim) throw std::invalid_argument("Fock matrix has the wrong size");
  if ((data_ - data_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("Fock matrix is not Hermitian");
  if (data_.trace().real() > 1.0 + 1e-12) throw std::invalid_argument("Fock matrix trace exceeds 1");
}

bool FockDensityMatrix::is_positive_semidefinite(double tol) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(data_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

FockDensityMatrix FockDensityMatrix::from_state_vector(int cutoff, int n_modes, const Eigen::VectorXcd& psi) {
  Eigen::MatrixXcd rho = psi * psi.adjoint();
  return FockDensityMatrix(cutoff, n_modes, std::move(rho), 1.0 - psi.squaredNorm());
}

FockDensityMatrix build_tmss_fock(double s, int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("Fock cutoff must be >= 1");
  if (!std::isfinite(s)) throw std::invalid_argument("squeezing parameter must be finite");
  const double t = std::tanh(0.5 * s);
  const double norm = 1.0 / std::cosh(0.5 * s);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cutoff) * cutoff);
  double amp = norm;
  for (int j = 0; j < cutoff; ++j) {
    psi(static_cast<Eigen::Index>(j) * cutoff + j) = amp;
    amp *= t;
  }
  return FockDensityMatrix::from_state_vector(cutoff, 2, psi);
}

Eigen::MatrixXcd reduced_state(const FockDensityMatrix& rho, int mode) {
  const int n = rho.cutoff();
  if (mode < 0 || mode >= rho.n_modes()) throw std::invalid_argument("Fock mode index out of range");
  if (rho.n_modes() == 1) return rho.data();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  const auto& d = rho.data();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::complex<double> sum = 0.0;
      for (int k = 0; k < n; ++k) {
        const Eigen::Index ia = mode == 0 ? Eigen::Index(a) * n + k : Eigen::Index(k) * n + a;
        const Eigen::Index ib = mode == 0 ? Eigen::Index(b) * n + k : Eigen::Index(k) * n + b;
        sum += d(ia, ib);
      }
      out(a, b) = sum;
    }
  return out;
}

double mean_photon_number(const FockDensityMatrix& rho, int mode) {
  const Eigen::MatrixXcd r = reduced_state(rho, mode);
  double n = 0.0;
  for (int j = 0; j < rho.cutoff(); ++j) n += j * r(j, j).real();
  return n;
}

Vector hermite_functions(double x, int count) {
  if (count < 1) throw std::invalid_argument("need at least one Hermite function");
  Vector psi(count);
  psi(0) = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (count > 1) psi(1) = std::sqrt(2.0) * x * psi(0);
  for (int n = 1; n + 1 < count; ++n)
    psi(n + 1) = std::sqrt(2.0 / (n + 1)) * x * psi(n) - std::sqrt(double(n) / (n + 1)) * psi(n - 1);
  return psi;
}

namespace {

std::vector<double> marginal_on_grid(const FockDensityMatrix& rho, const QuadratureDirection& dir,
                                     std::span<const double> grid, bool parallel) {
  if (grid.empty()) throw std::invalid_argument("marginal grid must be non-empty");
  const Eigen::MatrixXcd r = reduced_state(rho, dir.mode);
  const int n = rho.cutoff();
  Eigen::VectorXcd phase(n);
  for (int k = 0; k < n; ++k) phase(k) = std::polar(1.0, dir.phi * k);

  std::vector<double> out(grid.size());
  const auto count = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (long i = 0; i < count; ++i) {
    // a_k = <k|x_phi> = exp(i phi k) psi_k(x); density = a^dagger rho a.
    const Eigen::VectorXcd a = phase.cwiseProduct(hermite_functions(grid[i], n).cast<std::complex<double>>());
    out[i] = a.dot(r * a).real();
  }
  return out;
}

}  // namespace

std::vector<double> quadrature_marginal_fock(const FockDensityMatrix& rho, const QuadratureDirection& dir,
                                             std::span<const double> grid) {
  return marginal_on_grid(rho, dir, grid, true);
}

std::vector<double> quadrature_marginal_fock_serial(const FockDensityMatrix& rho, const QuadratureDirection& dir,
                                                    std::span<const double> grid) {
  return marginal_on_grid(rho, dir, grid, false);
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw std::invalid_argument("uniform_grid needs n >= 2 and hi > lo");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  if (grid.size() != values.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double sum = 0.0;
  for (size_t i = 1; i < grid.size(); ++i) sum += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return sum;
}

}  // namespace cvretro::oracle

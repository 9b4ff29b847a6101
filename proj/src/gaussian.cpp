#include "cvretro/gaussian.hpp"

#include <algorithm>
#include <complex>
#include <limits>
#include <stdexcept>

namespace cvretro {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " has non-finite entries");
}

double symmetry_defect_of(const Matrix& cov) {
  if (cov.size() == 0) return 0.0;
  return (cov - cov.transpose()).cwiseAbs().maxCoeff();
}

double relative_symmetry_defect(const Matrix& cov) {
  double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  return symmetry_defect_of(cov) / scale;
}

// Smallest eigenvalue of the Hermitian matrix cov + (i/2) Omega.
double heisenberg_margin_of(const Matrix& cov) {
  const int n = static_cast<int>(cov.rows() / 2);
  Eigen::MatrixXcd h = cov.cast<std::complex<double>>();
  Matrix omega = SymplecticForm::interleaved(n).matrix;
  h += std::complex<double>(0.0, 0.5) * omega.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<int> mode_quadratures(std::span<const int> modes) {
  std::vector<int> idx;
  idx.reserve(2 * modes.size());
  for (int m : modes) {
    idx.push_back(2 * m);
    idx.push_back(2 * m + 1);
  }
  return idx;
}

}  // namespace

std::string to_string(OperatorKind kind) { return kind == OperatorKind::State ? "state" : "effect"; }

OperatorKind operator_kind_from_string(const std::string& text) {
  if (text == "state" || text == "State") return OperatorKind::State;
  if (text == "effect" || text == "Effect") return OperatorKind::Effect;
  throw std::invalid_argument("unknown operator kind '" + text + "' (expected state or effect)");
}

ScalarGaussian::ScalarGaussian(double mean, double variance) : mean_(mean), variance_(variance) {
  if (!std::isfinite(mean) || !std::isfinite(variance) || variance <= 0.0)
    throw std::invalid_argument("ScalarGaussian needs a finite mean and a positive finite variance");
}

double ScalarGaussian::density(double x) const {
  double d = x - mean_;
  return std::exp(-0.5 * d * d / variance_) / std::sqrt(2.0 * kPi * variance_);
}

GaussianOperator::GaussianOperator(OperatorKind kind, Vector mean, Matrix cov)
    : kind_(kind), mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() < 2 || mean_.size() % 2 != 0)
    throw std::invalid_argument("mean must have length 2*n_modes with n_modes >= 1");
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
    throw std::invalid_argument("cov must be a square matrix matching the mean length");
  require_finite(mean_, "mean");
  require_finite(cov_, "cov");
  if (relative_symmetry_defect(cov_) > 1e-12) throw std::invalid_argument("cov is not symmetric");
}

Eigen::Vector2d GaussianOperator::mode_mean(int mode) const {
  if (mode < 0 || mode >= n_modes()) throw std::invalid_argument("mode index out of range");
  return mean_.segment<2>(2 * mode);
}

Eigen::Matrix2d GaussianOperator::mode_cov(int mode) const {
  if (mode < 0 || mode >= n_modes()) throw std::invalid_argument("mode index out of range");
  return cov_.block<2, 2>(2 * mode, 2 * mode);
}

GaussianOperator GaussianOperator::with_mean(Vector mean) const {
  return GaussianOperator(kind_, std::move(mean), cov_);
}

SymplecticForm SymplecticForm::interleaved(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return {n_modes, omega};
}

Eigen::PermutationMatrix<Eigen::Dynamic> blocked_to_interleaved(int meter_modes, int system_modes) {
  if (meter_modes < 0 || system_modes < 0 || meter_modes + system_modes < 1)
    throw std::invalid_argument("ordering needs at least one mode");
  const int dim = 2 * (meter_modes + system_modes);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(dim);
  for (int k = 0; k < meter_modes; ++k) {
    p.indices()[k] = 2 * k;                    // q_k
    p.indices()[meter_modes + k] = 2 * k + 1;  // pi_k
  }
  for (int t = 2 * meter_modes; t < dim; ++t) p.indices()[t] = t;
  return p;
}

Matrix symplectic_form(const PhaseSpaceOrdering& ordering) {
  Matrix omega = SymplecticForm::interleaved(ordering.n_modes()).matrix;
  if (ordering.layout == PhaseSpaceOrdering::Layout::Interleaved) return omega;
  auto p = blocked_to_interleaved(ordering.meter_modes, ordering.system_modes);
  return p.transpose() * omega * p;
}

LinearPhaseSpaceMap::LinearPhaseSpaceMap(Matrix matrix, PhaseSpaceOrdering ordering)
    : matrix_(std::move(matrix)), ordering_(ordering) {
  if (ordering_.n_modes() < 1) throw std::invalid_argument("linear map needs at least one mode");
  if (matrix_.rows() != ordering_.dimension() || matrix_.cols() != ordering_.dimension())
    throw std::invalid_argument("linear map dimension does not match its ordering");
  require_finite(matrix_, "linear map");
}

double LinearPhaseSpaceMap::symplectic_defect() const {
  Matrix omega = symplectic_form(ordering_);
  return (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
}

LinearPhaseSpaceMap LinearPhaseSpaceMap::to_interleaved() const {
  if (ordering_.layout == PhaseSpaceOrdering::Layout::Interleaved) return *this;
  auto p = blocked_to_interleaved(ordering_.meter_modes, ordering_.system_modes);
  Matrix l = p * matrix_ * p.transpose();
  return LinearPhaseSpaceMap(std::move(l), PhaseSpaceOrdering::interleaved(ordering_.n_modes()));
}

LinearPhaseSpaceMap LinearPhaseSpaceMap::identity(int n_modes) {
  return LinearPhaseSpaceMap(Matrix::Identity(2 * n_modes, 2 * n_modes),
                             PhaseSpaceOrdering::interleaved(n_modes));
}

LinearPhaseSpaceMap LinearPhaseSpaceMap::rotation(int n_modes, int mode, double theta) {
  if (mode < 0 || mode >= n_modes) throw std::invalid_argument("mode index out of range");
  Matrix l = Matrix::Identity(2 * n_modes, 2 * n_modes);
  const double c = std::cos(theta), s = std::sin(theta);
  l.block<2, 2>(2 * mode, 2 * mode) << c, s, -s, c;
  return LinearPhaseSpaceMap(std::move(l), PhaseSpaceOrdering::interleaved(n_modes));
}

GaussianOperator make_vacuum(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("make_vacuum: n_modes must be >= 1");
  return GaussianOperator(OperatorKind::State, Vector::Zero(2 * n_modes),
                          0.5 * Matrix::Identity(2 * n_modes, 2 * n_modes));
}

GaussianOperator make_coherent(const Vector& mean) {
  if (mean.size() < 2 || mean.size() % 2 != 0)
    throw std::invalid_argument("make_coherent: mean must have even length >= 2");
  return GaussianOperator(OperatorKind::State, mean, 0.5 * Matrix::Identity(mean.size(), mean.size()));
}

namespace {

Matrix two_mode_squeezed_cov(double s) {
  if (!std::isfinite(s)) throw std::invalid_argument("squeezing parameter must be finite");
  const double c = std::cosh(s), sh = std::sinh(s);
  Matrix cov(4, 4);
  cov << c, 0, sh, 0,
         0, c, 0, -sh,
         sh, 0, c, 0,
         0, -sh, 0, c;
  return 0.5 * cov;
}

}  // namespace

GaussianOperator make_two_mode_squeezed(double s) {
  return GaussianOperator(OperatorKind::State, Vector::Zero(4), two_mode_squeezed_cov(s));
}

GaussianOperator make_epr_effect(double s_prime, const Eigen::Vector4d& means) {
  return GaussianOperator(OperatorKind::Effect, means, two_mode_squeezed_cov(s_prime));
}

GaussianOperator make_homodyne_effect(double phi, double outcome, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("homodyne eps must be positive");
  if (!std::isfinite(phi) || !std::isfinite(outcome))
    throw std::invalid_argument("homodyne angle and outcome must be finite");
  Eigen::Matrix2d r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  Eigen::Matrix2d cov = r * Eigen::Vector2d(eps, 1.0 / eps).asDiagonal() * r.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  Vector mean = outcome * r.col(0);
  return GaussianOperator(OperatorKind::Effect, std::move(mean), Matrix(cov));
}

double rotated_variance(const GaussianOperator& op, const QuadratureDirection& dir) {
  if (dir.mode < 0 || dir.mode >= op.n_modes())
    throw std::invalid_argument("quadrature direction refers to a mode out of range");
  if (!std::isfinite(dir.phi)) throw std::invalid_argument("quadrature angle must be finite");
  const Eigen::Vector2d u = dir.unit();
  return u.dot(op.mode_cov(dir.mode) * u);
}

ScalarGaussian marginal(const GaussianOperator& op, const QuadratureDirection& dir) {
  const double var = rotated_variance(op, dir);
  return ScalarGaussian(dir.unit().dot(op.mode_mean(dir.mode)), var);
}

GaussianOperator apply_linear_map(const GaussianOperator& op, const LinearPhaseSpaceMap& map) {
  if (map.ordering().layout != PhaseSpaceOrdering::Layout::Interleaved)
    throw std::invalid_argument("apply_linear_map expects an interleaved map; call to_interleaved() first");
  if (map.matrix().cols() != op.mean().size())
    throw std::invalid_argument("linear map dimension does not match the operator");
  const Matrix& l = map.matrix();
  Matrix cov = l * op.cov() * l.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianOperator(op.kind(), l * op.mean(), std::move(cov));
}

GaussianMoments condition_moments(const Vector& mean, const Matrix& cov, std::span<const int> keep,
                                  std::span<const int> cond, const Vector& effect_mean,
                                  const Matrix& effect_cov) {
  const std::vector<int> k(keep.begin(), keep.end());
  const std::vector<int> c(cond.begin(), cond.end());
  if (effect_mean.size() != static_cast<Eigen::Index>(c.size()) || effect_cov.rows() != effect_mean.size() ||
      effect_cov.cols() != effect_mean.size())
    throw std::invalid_argument("effect dimension does not match the conditioned quadratures");
  for (int i : k)
    if (i < 0 || i >= mean.size()) throw std::invalid_argument("kept quadrature index out of range");
  for (int i : c)
    if (i < 0 || i >= mean.size()) throw std::invalid_argument("conditioned quadrature index out of range");

  Matrix total = cov(c, c) + effect_cov;
  total = 0.5 * (total + total.transpose()).eval();
  Eigen::LLT<Matrix> llt(total);
  if (llt.info() != Eigen::Success)
    throw NumericalSingularity("sigma_B + sigma_E is not positive definite");
  const double rcond = llt.rcond();
  if (!(rcond >= kSingularityRcond))
    throw NumericalSingularity("sigma_B + sigma_E is numerically singular (rcond " + std::to_string(rcond) + ")");

  const Matrix cross = cov(k, c);
  const Matrix gain = llt.solve(cross.transpose()).transpose();  // S_kc (S_cc + S_E)^-1
  GaussianMoments out;
  out.cov = cov(k, k);
  out.cov.noalias() -= gain * cross.transpose();
  const Eigen::Index n = out.cov.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double avg = 0.5 * (out.cov(i, j) + out.cov(j, i));
      out.cov(i, j) = avg;
      out.cov(j, i) = avg;
    }
  out.mean = mean(k) + gain * (effect_mean - mean(c));
  return out;
}

GaussianOperator condition_on_effect(const GaussianOperator& joint, std::span<const int> part_b,
                                     const GaussianOperator& effect_b) {
  if (joint.kind() != OperatorKind::State) throw std::invalid_argument("condition_on_effect needs a state");
  if (effect_b.kind() != OperatorKind::Effect) throw std::invalid_argument("condition_on_effect needs an effect");
  if (static_cast<int>(part_b.size()) != effect_b.n_modes())
    throw std::invalid_argument("effect mode count does not match part_B");
  std::vector<bool> in_b(joint.n_modes(), false);
  for (int m : part_b) {
    if (m < 0 || m >= joint.n_modes()) throw std::invalid_argument("part_B mode index out of range");
    if (in_b[m]) throw std::invalid_argument("part_B lists a mode twice");
    in_b[m] = true;
  }
  std::vector<int> part_a;
  for (int m = 0; m < joint.n_modes(); ++m)
    if (!in_b[m]) part_a.push_back(m);
  if (part_a.empty()) throw std::invalid_argument("conditioning on every mode leaves nothing");

  const auto keep = mode_quadratures(part_a);
  const auto cond = mode_quadratures(part_b);
  GaussianMoments m = condition_moments(joint.mean(), joint.cov(), keep, cond, effect_b.mean(), effect_b.cov());
  return GaussianOperator(OperatorKind::State, std::move(m.mean), std::move(m.cov));
}

Vector symplectic_eigenvalues(const Matrix& cov) {
  if (cov.rows() != cov.cols() || cov.rows() % 2 != 0 || cov.rows() == 0)
    throw std::invalid_argument("symplectic_eigenvalues needs a 2n x 2n matrix");
  const int n = static_cast<int>(cov.rows() / 2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (cov + cov.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("symplectic_eigenvalues needs a positive definite matrix");
  const Matrix root = es.operatorSqrt();
  const Matrix omega = SymplecticForm::interleaved(n).matrix;
  Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * (root * omega * root).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h, Eigen::EigenvaluesOnly);
  // Eigenvalues come in pairs +-nu, sorted ascending; the top half is positive.
  return hs.eigenvalues().tail(n);
}

ValidationReport validate(const GaussianOperator& op, double tol) {
  ValidationReport r;
  r.kind = op.kind();
  const Matrix& cov = op.cov();
  r.symmetry_defect = symmetry_defect_of(cov);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (cov + cov.transpose()), Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.positive_definite = r.min_eigenvalue > 0.0;
  r.min_symplectic_eigenvalue = r.positive_definite ? symplectic_eigenvalues(cov).minCoeff()
                                                    : std::numeric_limits<double>::quiet_NaN();
  r.heisenberg_margin = heisenberg_margin_of(0.5 * (cov + cov.transpose()));

  if (r.symmetry_defect > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff()))
    r.issues.push_back("covariance is not symmetric");
  if (op.kind() == OperatorKind::State) {
    r.admissible = r.heisenberg_margin >= -tol;
    if (!r.admissible) r.issues.push_back("state violates the uncertainty principle (cov + i/2 Omega not PSD)");
  } else {
    r.admissible = r.positive_definite;
    if (!r.admissible) r.issues.push_back("effect covariance is not positive definite");
  }
  return r;
}

void require_admissible(const GaussianOperator& op, const std::string& what, double tol) {
  ValidationReport r = validate(op, tol);
  if (!r.admissible) throw std::invalid_argument(what + ": " + r.issues.front());
}

}  // namespace cvretro

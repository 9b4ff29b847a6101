#include "cvretro/retrodiction.hpp"

#include <stdexcept>

namespace cvretro {

namespace {

struct ProjectedGaussian {
  Vector mean;
  Matrix cov;
};

// Rotate dir.mode so that x_phi is its first quadrature, then drop the
// conjugate quadrature. The measured coordinate ends up at index 0.
ProjectedGaussian project_out_conjugate(const GaussianOperator& op, const QuadratureDirection& dir) {
  const int n = op.n_modes();
  Matrix l = LinearPhaseSpaceMap::rotation(n, dir.mode, dir.phi).matrix();
  Vector mean = l * op.mean();
  Matrix cov = l * op.cov() * l.transpose();

  std::vector<int> keep{2 * dir.mode};
  for (int i = 0; i < 2 * n; ++i)
    if (i / 2 != dir.mode) keep.push_back(i);
  return {mean(keep), cov(keep, keep)};
}

Eigen::LLT<Matrix> spd_factor(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(0.5 * (m + m.transpose()));
  if (llt.info() != Eigen::Success || !(llt.rcond() >= kSingularityRcond))
    throw NumericalSingularity(std::string(what) + " covariance is singular");
  return llt;
}

// Normalized product of N(m1, S1) and N(m2, S2).
ProjectedGaussian gaussian_product(const ProjectedGaussian& a, const ProjectedGaussian& b) {
  auto la = spd_factor(a.cov, "rho");
  auto lb = spd_factor(b.cov, "effect");
  const Eigen::Index d = a.mean.size();
  Matrix precision = la.solve(Matrix::Identity(d, d)) + lb.solve(Matrix::Identity(d, d));
  precision = 0.5 * (precision + precision.transpose()).eval();
  Eigen::LLT<Matrix> lp(precision);
  if (lp.info() != Eigen::Success) throw NumericalSingularity("combined precision is not positive definite");
  Vector rhs = la.solve(a.mean) + lb.solve(b.mean);
  ProjectedGaussian out;
  out.cov = lp.solve(Matrix::Identity(d, d));
  out.mean = lp.solve(rhs);
  return out;
}

void require_mode(const PqsPair& pair, const QuadratureDirection& dir) {
  if (dir.mode < 0 || dir.mode >= pair.n_modes())
    throw std::invalid_argument("quadrature direction refers to a mode out of range");
  if (!std::isfinite(dir.phi)) throw std::invalid_argument("quadrature angle must be finite");
}

void require_single_mode(const PqsPair& pair) {
  if (pair.n_modes() != 1) throw std::invalid_argument("expected a single-mode pair");
}

}  // namespace

PqsPair::PqsPair(GaussianOperator rho, GaussianOperator effect) : rho_(std::move(rho)), effect_(std::move(effect)) {
  if (rho_.kind() != OperatorKind::State) throw std::invalid_argument("PqsPair: rho must be a state");
  if (effect_.kind() != OperatorKind::Effect) throw std::invalid_argument("PqsPair: E must be an effect");
  if (rho_.n_modes() != effect_.n_modes()) throw std::invalid_argument("PqsPair: mode counts differ");
  require_admissible(rho_, "PqsPair rho");
  require_admissible(effect_, "PqsPair effect");
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::SingleMode: return "single-mode";
    case Provenance::TwoModeEPR: return "two-mode-epr";
    case Provenance::Heterodyne: return "heterodyne";
  }
  return "unknown";
}

double pqs_variance_single(const PqsPair& pair, const QuadratureDirection& dir) {
  require_single_mode(pair);
  require_mode(pair, dir);
  const double vr = rotated_variance(pair.rho(), dir);
  const double ve = rotated_variance(pair.effect(), dir);
  return 1.0 / (1.0 / vr + 1.0 / ve);
}

RetrodictionResult pqs_distribution_single(const PqsPair& pair, const QuadratureDirection& dir) {
  require_single_mode(pair);
  require_mode(pair, dir);
  const ScalarGaussian r = marginal(pair.rho(), dir);
  const ScalarGaussian e = marginal(pair.effect(), dir);
  const double mean =
      (e.variance() * r.mean() + r.variance() * e.mean()) / (r.variance() + e.variance());
  return {ScalarGaussian(mean, pqs_variance_single(pair, dir)), dir, Provenance::SingleMode};
}

RetrodictionResult pqs_projective(const PqsPair& pair, const QuadratureDirection& dir) {
  require_mode(pair, dir);
  if (pair.n_modes() == 1) return pqs_distribution_single(pair, dir);
  ProjectedGaussian product =
      gaussian_product(project_out_conjugate(pair.rho(), dir), project_out_conjugate(pair.effect(), dir));
  return {ScalarGaussian(product.mean(0), product.cov(0, 0)), dir, Provenance::TwoModeEPR};
}

RetrodictionResult pqs_two_mode(const GaussianOperator& rho2, const GaussianOperator& effect2,
                                const QuadratureDirection& dir) {
  if (rho2.n_modes() != 2 || effect2.n_modes() != 2)
    throw std::invalid_argument("pqs_two_mode expects two-mode operators");
  if (dir.mode != 0) throw std::invalid_argument("pqs_two_mode measures mode 0");
  RetrodictionResult r = pqs_projective(PqsPair(rho2, effect2), dir);
  r.provenance = Provenance::TwoModeEPR;
  return r;
}

ScalarGaussian combined_gaussian_projection(const PqsPair& pair, const QuadratureDirection& dir) {
  require_mode(pair, dir);
  ProjectedGaussian product = gaussian_product({pair.rho().mean(), pair.rho().cov()},
                                               {pair.effect().mean(), pair.effect().cov()});
  const Eigen::Vector2d u = dir.unit();
  const int i = 2 * dir.mode;
  return ScalarGaussian(u.dot(product.mean.segment<2>(i)), u.dot(product.cov.block<2, 2>(i, i) * u));
}

HeterodyneEstimate heterodyne_retrodiction(const PqsPair& pair) {
  require_single_mode(pair);
  const Eigen::Matrix2d half = 0.5 * Eigen::Matrix2d::Identity();
  ProjectedGaussian product = gaussian_product({pair.rho().mean(), pair.rho().cov() + half},
                                               {pair.effect().mean(), pair.effect().cov() + half});
  return {product.mean, product.cov};
}

std::vector<ButterflyPoint> butterfly_curve(const PqsPair& pair, std::span<const double> phi_grid) {
  require_single_mode(pair);
  if (phi_grid.empty()) throw std::invalid_argument("butterfly_curve needs a non-empty angle grid");
  std::vector<ButterflyPoint> out;
  out.reserve(phi_grid.size());
  for (double phi : phi_grid) out.push_back({phi, pqs_variance_single(pair, {0, phi})});
  return out;
}

std::vector<double> angle_grid(int n, double span) {
  if (n < 1) throw std::invalid_argument("angle grid needs at least one point");
  std::vector<double> phis(n);
  for (int j = 0; j < n; ++j) phis[j] = span * j / n;
  return phis;
}

}  // namespace cvretro

#include "cvretro/joint_measurement.hpp"

#include <numeric>
#include <stdexcept>

#include "cvretro/meter_kernels.hpp"
#include "cvretro/retrodiction.hpp"

namespace cvretro {

namespace {

std::vector<int> iota_indices(int first, int count) {
  std::vector<int> idx(count);
  std::iota(idx.begin(), idx.end(), first);
  return idx;
}

// Initial meters + system in interleaved layout (meters are modes 0..m-1).
GaussianOperator initial_joint_state(const Scenario& sc) {
  const int m = sc.m;
  const int dim = 2 * m + 4;
  Matrix cov = Matrix::Zero(dim, dim);
  Vector mean(dim);
  for (int i = 0; i < m; ++i) {
    cov(i, i) = 0.5 * sc.z;
    cov(m + i, m + i) = 0.5 / sc.z;
  }
  cov.bottomRightCorner<4, 4>() = sc.system_state().cov();
  mean.head(2 * m) = sc.meter_means;
  mean.tail<4>() = sc.rho_means;
  auto p = blocked_to_interleaved(m, 2);
  return GaussianOperator(OperatorKind::State, p * mean, p * cov * p.transpose());
}

MeterStatistics pi_block_of_interleaved(const GaussianOperator& meters, int m, bool postselected) {
  std::vector<int> pi(m);
  for (int i = 0; i < m; ++i) pi[i] = 2 * i + 1;
  return {meters.mean()(pi), meters.cov()(pi, pi), postselected};
}

void require_target(const Scenario& sc, int k) {
  if (k < 0 || k >= sc.m) throw std::invalid_argument("target meter index out of range");
}

Vector balanced_weights(const Scenario& sc, int k) {
  Vector d(sc.m);
  for (int i = 0; i < sc.m; ++i) d(i) = 2.0 / sc.m * std::cos(sc.angles[i] - sc.angles[k]);
  return d;
}

}  // namespace

LinearPhaseSpaceMap build_transform(const Scenario& sc) {
  sc.validate();
  const int m = sc.m;
  const int x1 = 2 * m, p1 = 2 * m + 1;
  Matrix l = Matrix::Identity(2 * m + 4, 2 * m + 4);
  const Matrix c = CommutatorMatrix::from_angles(sc.angles).matrix;
  for (int i = 0; i < m; ++i) {
    const double ci = std::cos(sc.angles[i]), si = std::sin(sc.angles[i]);
    l(m + i, x1) += ci;
    l(m + i, p1) += si;
    for (int j = 0; j < m; ++j) l(m + i, j) += 0.5 * c(i, j);
    l(x1, i) -= si;
    l(p1, i) += ci;
  }
  return LinearPhaseSpaceMap(std::move(l), sc.ordering());
}

MeterStatistics predicted_meter_stats(const Scenario& sc) {
  GaussianMoments joint = kernels::meter_system_moments(sc);
  const int m = sc.m;
  return {joint.mean.head(m), joint.cov.topLeftCorner(m, m), false};
}

MeterStatistics retrodict_meter_stats(const Scenario& sc) {
  GaussianMoments joint = kernels::meter_system_moments(sc);
  const int m = sc.m;
  const GaussianOperator effect = sc.system_effect();
  const auto keep = iota_indices(0, m);
  const auto cond = iota_indices(m, 4);
  GaussianMoments post = condition_moments(joint.mean, joint.cov, keep, cond, effect.mean(), effect.cov());
  return {std::move(post.mean), std::move(post.cov), true};
}

MeterStatistics predicted_meter_stats_reference(const Scenario& sc) {
  const GaussianOperator evolved = apply_linear_map(initial_joint_state(sc), build_transform(sc).to_interleaved());
  return pi_block_of_interleaved(evolved, sc.m, false);
}

MeterStatistics retrodict_meter_stats_reference(const Scenario& sc) {
  const GaussianOperator evolved = apply_linear_map(initial_joint_state(sc), build_transform(sc).to_interleaved());
  const int system_modes[] = {sc.m, sc.m + 1};
  const GaussianOperator meters = condition_on_effect(evolved, system_modes, sc.system_effect());
  return pi_block_of_interleaved(meters, sc.m, true);
}

Vector constrained_min_variance_weights(const Matrix& pi_cov, const std::vector<double>& angles, double target) {
  const auto m = static_cast<Eigen::Index>(angles.size());
  if (m < 1 || pi_cov.rows() != m || pi_cov.cols() != m)
    throw std::invalid_argument("covariance size does not match the angle count");
  Matrix a(2, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(0, i) = std::cos(angles[i] - target);
    a(1, i) = std::sin(angles[i] - target);
  }
  const Eigen::Vector2d b(1.0, 0.0);

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  const Matrix u_r = svd.matrixU().leftCols(rank);
  if ((b - u_r * (u_r.transpose() * b)).norm() > 1e-9)
    throw InfeasibleConstraints("no weights reproduce the target quadrature with these meter angles");

  const Matrix a_r = u_r.transpose() * a;
  const Vector b_r = u_r.transpose() * b;
  const Eigen::Index n = m + rank;
  Matrix kkt = Matrix::Zero(n, n);
  kkt.topLeftCorner(m, m) = 2.0 * pi_cov;
  kkt.topRightCorner(m, rank) = a_r.transpose();
  kkt.bottomLeftCorner(rank, m) = a_r;
  Vector rhs = Vector::Zero(n);
  rhs.tail(rank) = b_r;
  Eigen::FullPivLU<Matrix> lu(kkt);
  if (!lu.isInvertible()) throw NumericalSingularity("KKT system is singular");
  return lu.solve(rhs).head(m);
}

Vector optimal_weights(const Scenario& sc, int k) {
  sc.validate();
  require_target(sc, k);
  if (sc.has_balanced_angles()) return balanced_weights(sc, k);
  return constrained_min_variance_weights(retrodict_meter_stats(sc).pi_cov, sc.angles, sc.angles[k]);
}

CombinationResult optimal_combination(const Scenario& sc, int k) {
  sc.validate();
  require_target(sc, k);
  const MeterStatistics stats = retrodict_meter_stats(sc);
  CombinationResult r;
  r.closed_form_weights = sc.has_balanced_angles();
  r.weights = r.closed_form_weights ? balanced_weights(sc, k)
                                    : constrained_min_variance_weights(stats.pi_cov, sc.angles, sc.angles[k]);
  r.variance = r.weights.dot(stats.pi_cov * r.weights);
  if (r.closed_form_weights) {
    const double sigma_p =
        pqs_two_mode(sc.system_state(), sc.system_effect(), {0, sc.angles[k]}).distribution.variance();
    r.closed_form = 1.0 / (sc.m * sc.z) + sigma_p;
  }
  return r;
}

double optimal_combination_variance(const Scenario& sc, int k) { return optimal_combination(sc, k).variance; }

}  // namespace cvretro

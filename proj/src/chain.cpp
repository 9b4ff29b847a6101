#include "cvretro/chain.hpp"

#include <random>
#include <stdexcept>

namespace cvretro::oracle {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::Matrix4d cholesky4(const Matrix& cov, const char* what) {
  if (cov.rows() != 4 || cov.cols() != 4) throw std::invalid_argument(std::string(what) + " must be 4x4");
  const Eigen::Matrix4d c4 = cov;
  Eigen::LLT<Eigen::Matrix4d> llt(c4);
  if (llt.info() != Eigen::Success) throw std::invalid_argument(std::string(what) + " is not positive definite");
  return llt.matrixL();
}

MomentAccumulator accumulate(int dim, long long trials, std::uint64_t seed, const TrialSampler& sampler,
                             bool parallel) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const long long chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<MomentAccumulator> partial(chunks, MomentAccumulator(dim));

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long long c = 0; c < chunks; ++c) {
    Vector sample(dim);
    MomentAccumulator& acc = partial[c];
    const long long end = std::min(trials, (c + 1) * kChunkTrials);
    for (long long t = c * kChunkTrials; t < end; ++t) {
      SplitMix64 rng = trial_stream(seed, static_cast<std::uint64_t>(t));
      sampler(rng, sample);
      acc.add(sample);
    }
  }

  MomentAccumulator total(dim);
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace

SplitMix64::result_type SplitMix64::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return SplitMix64(mix64(seed ^ mix64(trial + 0x632be59bd9b4e019ULL)));
}

void MomentAccumulator::add(const Vector& sample) {
  ++count;
  const Vector delta = sample - mean;
  mean += delta / static_cast<double>(count);
  scatter.noalias() += delta * (sample - mean).transpose();
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count), nb = static_cast<double>(other.count);
  const double n = na + nb;
  const Vector delta = other.mean - mean;
  mean += delta * (nb / n);
  scatter += other.scatter + delta * delta.transpose() * (na * nb / n);
  count += other.count;
}

Matrix MomentAccumulator::covariance() const {
  if (count < 2) throw std::invalid_argument("covariance needs at least two samples");
  return scatter / static_cast<double>(count - 1);
}

MomentAccumulator accumulate_trials(int dim, long long trials, std::uint64_t seed, const TrialSampler& sampler) {
  return accumulate(dim, trials, seed, sampler, true);
}

MomentAccumulator accumulate_trials_serial(int dim, long long trials, std::uint64_t seed,
                                           const TrialSampler& sampler) {
  return accumulate(dim, trials, seed, sampler, false);
}

ChainModel::ChainModel(const Scenario& sc, std::optional<Matrix> effect_cov)
    : m_(sc.m),
      z_(sc.z),
      commutator_(CommutatorMatrix::from_angles(sc.angles).matrix),
      meter_means_(sc.meter_means),
      rho_means_(sc.rho_means) {
  sc.validate();
  for (double a : sc.angles) {
    cos_.push_back(std::cos(a));
    sin_.push_back(std::sin(a));
  }
  rho_factor_ = cholesky4(sc.system_state().cov(), "system covariance");
  effect_factor_ = cholesky4(effect_cov ? *effect_cov : sc.system_effect().cov(), "effect covariance");
}

void ChainModel::sample(SplitMix64& rng, Vector& out) const {
  std::normal_distribution<double> normal;
  const int m = m_;
  const double q_sd = std::sqrt(0.5 * z_), pi_sd = std::sqrt(0.5 / z_);

  thread_local Vector q;
  q.resize(m);
  for (int i = 0; i < m; ++i) q(i) = meter_means_(i) + q_sd * normal(rng);
  Eigen::Vector4d g;
  for (int t = 0; t < 4; ++t) g(t) = normal(rng);
  Eigen::Vector4d r = rho_means_ + rho_factor_ * g;

  out.resize(m + 4);
  for (int i = 0; i < m; ++i) {
    double back = 0.0;
    for (int j = 0; j < m; ++j) back += commutator_(i, j) * q(j);
    const double pi = meter_means_(m + i) + pi_sd * normal(rng);
    out(i) = pi + cos_[i] * r(0) + sin_[i] * r(1) + 0.5 * back;
  }
  double dx = 0.0, dp = 0.0;
  for (int i = 0; i < m; ++i) {
    dx += sin_[i] * q(i);
    dp += cos_[i] * q(i);
  }
  r(0) -= dx;
  r(1) += dp;

  for (int t = 0; t < 4; ++t) g(t) = normal(rng);
  out.tail<4>() = r + effect_factor_ * g;
}

ChainSample ChainModel::sample_trial(std::uint64_t seed, std::uint64_t trial) const {
  SplitMix64 rng = trial_stream(seed, trial);
  Vector v(dimension());
  sample(rng, v);
  return {v.head(m_), v.tail<4>()};
}

ChainEstimate simulate_chain(const Scenario& sc, long long trials, std::uint64_t seed, const ChainOptions& options) {
  if (trials < 1000) throw std::invalid_argument("simulate_chain needs at least 1000 trials");
  const ChainModel model(sc, options.effect_cov);
  const int m = sc.m;
  TrialSampler sampler = [&model](SplitMix64& rng, Vector& out) { model.sample(rng, out); };
  const MomentAccumulator acc = options.parallel ? accumulate_trials(model.dimension(), trials, seed, sampler)
                                                 : accumulate_trials_serial(model.dimension(), trials, seed, sampler);

  const double n = static_cast<double>(acc.count);
  const Matrix cov = acc.covariance();
  const Matrix s_yy = cov.bottomRightCorner(4, 4);
  const Matrix s_py = cov.topRightCorner(m, 4);
  Eigen::LLT<Matrix> llt(s_yy);
  if (llt.info() != Eigen::Success) throw NumericalSingularity("sampled EPR outcome covariance is singular");

  ChainEstimate est;
  est.trials = acc.count;
  est.regression_slope = llt.solve(s_py.transpose()).transpose();
  Matrix resid = cov.topLeftCorner(m, m) - est.regression_slope * s_py.transpose();
  resid *= (n - 1.0) / (n - 5.0);

  const Vector dy = sc.effect_means - acc.mean.tail<4>();
  const double leverage = 1.0 / n + dy.dot(llt.solve(dy)) / (n - 1.0);
  est.empirical.pi_mean = acc.mean.head(m) + est.regression_slope * dy;
  est.empirical.pi_cov = resid;
  est.empirical.postselected = true;
  est.cov_stderr.resize(m, m);
  est.mean_stderr.resize(m);
  for (int i = 0; i < m; ++i) {
    est.mean_stderr(i) = std::sqrt(resid(i, i) * leverage);
    for (int j = 0; j < m; ++j)
      est.cov_stderr(i, j) = std::sqrt((resid(i, i) * resid(j, j) + resid(i, j) * resid(i, j)) / (n - 5.0));
  }
  return est;
}

SequentialEstimate simulate_sequential_single(const PqsPair& pair, const QuadratureDirection& dir,
                                              long long trials, std::uint64_t seed, bool parallel) {
  if (pair.n_modes() != 1) throw std::invalid_argument("sequential oracle is single-mode");
  if (trials < 1000) throw std::invalid_argument("sequential oracle needs at least 1000 trials");
  const ScalarGaussian prior = marginal(pair.rho(), dir);
  const ScalarGaussian post = marginal(pair.effect(), dir);
  const double prior_sd = std::sqrt(prior.variance()), post_sd = std::sqrt(post.variance());

  TrialSampler sampler = [&](SplitMix64& rng, Vector& out) {
    std::normal_distribution<double> normal;
    const double x = prior.mean() + prior_sd * normal(rng);  // Born rule for x_phi
    out(0) = x;
    out(1) = x + post_sd * normal(rng);  // <x_phi|E_w|x_phi> as a density in w
  };
  const MomentAccumulator acc =
      parallel ? accumulate_trials(2, trials, seed, sampler) : accumulate_trials_serial(2, trials, seed, sampler);

  const double n = static_cast<double>(acc.count);
  const Matrix cov = acc.covariance();
  const double slope = cov(0, 1) / cov(1, 1);
  const double resid = (cov(0, 0) - slope * cov(0, 1)) * (n - 1.0) / (n - 2.0);
  const double dw = post.mean() - acc.mean(1);

  SequentialEstimate est;
  est.trials = acc.count;
  est.variance = resid;
  est.variance_stderr = resid * std::sqrt(2.0 / (n - 2.0));
  est.mean = acc.mean(0) + slope * dw;
  est.mean_stderr = std::sqrt(resid * (1.0 / n + dw * dw / ((n - 1.0) * cov(1, 1))));
  return est;
}

Comparison compare_statistical(std::string name, double analytic, double empirical, double standard_error,
                               double max_sigma) {
  Comparison c{std::move(name), analytic, empirical, standard_error, 0.0, false};
  c.z_score = standard_error > 0.0 ? (empirical - analytic) / standard_error : 0.0;
  c.passed = std::isfinite(c.z_score) && std::abs(empirical - analytic) <= max_sigma * standard_error;
  return c;
}

Comparison compare_exact(std::string name, double analytic, double empirical, double tol) {
  Comparison c{std::move(name), analytic, empirical, 0.0, 0.0, false};
  c.passed = std::abs(empirical - analytic) <= tol;
  return c;
}

}  // namespace cvretro::oracle

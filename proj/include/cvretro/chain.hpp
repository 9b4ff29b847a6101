#pragma once

// Monte Carlo simulation of the linear-Gaussian measurement chain.
//
// Every trial owns a random substream derived from (seed, trial index), and
// trials are accumulated in fixed-size chunks merged in chunk order, so the
// serial and OpenMP-parallel drivers return bit-identical results.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cvretro/gaussian.hpp"
#include "cvretro/retrodiction.hpp"
#include "cvretro/scenario.hpp"

namespace cvretro::oracle {

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  std::uint64_t state_;
};

/// Independent substream for one trial.
SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial);

inline constexpr long long kChunkTrials = 4096;

/// Running mean and scatter matrix (sum of outer products of deviations).
struct MomentAccumulator {
  long long count = 0;
  Vector mean;
  Matrix scatter;

  explicit MomentAccumulator(int dim = 0) : mean(Vector::Zero(dim)), scatter(Matrix::Zero(dim, dim)) {}

  void add(const Vector& sample);
  void merge(const MomentAccumulator& other);
  /// Unbiased sample covariance.
  Matrix covariance() const;
};

/// Writes one trial's sample (dimension known to the caller) into `out`.
using TrialSampler = std::function<void(SplitMix64& rng, Vector& out)>;

MomentAccumulator accumulate_trials(int dim, long long trials, std::uint64_t seed, const TrialSampler& sampler);
MomentAccumulator accumulate_trials_serial(int dim, long long trials, std::uint64_t seed,
                                           const TrialSampler& sampler);

/// One trial of the chain: meter momentum readouts and EPR outcome.
struct ChainSample {
  Vector first_outcomes;
  Eigen::Vector4d epr_outcome;
};

/// Sampler for the meter-bank protocol.
///
/// Meters and system are drawn from their initial Gaussians, the coupling is
/// applied sample by sample, and the EPR outcome is the evolved system
/// quadratures plus noise with the effect covariance.
class ChainModel {
 public:
  explicit ChainModel(const Scenario& scenario, std::optional<Matrix> effect_cov = std::nullopt);

  int meters() const { return m_; }
  int dimension() const { return m_ + 4; }
  void sample(SplitMix64& rng, Vector& out) const;
  ChainSample sample_trial(std::uint64_t seed, std::uint64_t trial) const;

 private:
  int m_;
  double z_;
  std::vector<double> cos_, sin_;
  Matrix commutator_;
  Vector meter_means_;
  Eigen::Vector4d rho_means_;
  Eigen::Matrix4d rho_factor_;
  Eigen::Matrix4d effect_factor_;
};

struct ChainOptions {
  /// Replaces the scenario's EPR effect covariance.
  std::optional<Matrix> effect_cov;
  bool parallel = true;
};

struct ChainEstimate {
  /// Residual covariance of pi regressed on the EPR outcome, and the fitted
  /// conditional mean at the scenario's effect_means.
  MeterStatistics empirical;
  Matrix cov_stderr;
  Vector mean_stderr;
  Matrix regression_slope;
  long long trials = 0;
};

/// Throws std::invalid_argument for fewer than 1000 trials.
ChainEstimate simulate_chain(const Scenario& scenario, long long trials, std::uint64_t seed,
                             const ChainOptions& options = {});

struct SequentialEstimate {
  double variance = 0.0;
  double variance_stderr = 0.0;
  /// Conditional mean of the first outcome at the effect's centroid.
  double mean = 0.0;
  double mean_stderr = 0.0;
  long long trials = 0;
};

/// Single-mode sequential collapse: x from the Born marginal of rho, then the
/// final Gaussian measurement on the post-measurement eigenstate |x_phi>.
/// The conditional statistics of x given that outcome are regressed out.
SequentialEstimate simulate_sequential_single(const PqsPair& pair, const QuadratureDirection& dir,
                                              long long trials, std::uint64_t seed, bool parallel = true);

struct Comparison {
  std::string name;
  double analytic = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double z_score = 0.0;
  bool passed = false;
};

/// Statistical comparison: passes when |empirical - analytic| <= max_sigma * standard_error.
Comparison compare_statistical(std::string name, double analytic, double empirical, double standard_error,
                               double max_sigma = 3.0);

/// Deterministic comparison: passes when |empirical - analytic| <= tol.
Comparison compare_exact(std::string name, double analytic, double empirical, double tol);

}  // namespace cvretro::oracle

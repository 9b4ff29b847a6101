#pragma once

// Analytic results checked against the Monte Carlo and Fock-space oracles.

#include <cstdint>
#include <vector>

#include "cvretro/chain.hpp"
#include "cvretro/fock.hpp"

namespace cvretro {

struct VerifyOptions {
  long long trials = 1'000'000;
  std::uint64_t seed = 20240917;
  /// Fock cutoff for the marginal comparison.
  int cutoff = oracle::kDefaultCutoff;
};

/// Options of `verify --quick`: 1e5 trials per statistic.
VerifyOptions quick_verify_options();

struct VerifyReport {
  std::vector<oracle::Comparison> comparisons;
  double seconds = 0.0;

  bool all_passed() const;
};

/// Statistical checks pass within 3 standard errors; deterministic ones at fixed tolerances.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace cvretro

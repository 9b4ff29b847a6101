#pragma once

// Moments of the meter momenta and system quadratures after the impulsive
// meter-bank interaction, filled in O(m^2) without forming L sigma L^T.
//
// The commutator matrix factors as C = s c^T - c s^T with c_k = cos(phi_k),
// s_k = sin(phi_k), so every entry of C C^T and C s, C c reduces to the three
// sums sum c^2, sum s^2, sum s c.
//
// Output layout: (pi'_1..pi'_m, x1', p1', x2', p2').

#include "cvretro/gaussian.hpp"
#include "cvretro/scenario.hpp"

namespace cvretro::kernels {

/// OpenMP-parallel over meter rows.
GaussianMoments meter_system_moments(const Scenario& scenario);

/// Single-threaded reference; bit-identical to the parallel kernel.
GaussianMoments meter_system_moments_serial(const Scenario& scenario);

}  // namespace cvretro::kernels

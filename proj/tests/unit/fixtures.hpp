// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// fixtures.hpp: shared test fixtures (the default evaluation scenario's
// geometry constants, random-instance helpers).

#pragma once

#include "core/contour.hpp"
#include "core/crb.hpp"
#include "core/rng.hpp"

namespace isac::testing {

/// Default extended-target contour used throughout the evaluation setup.
inline ContourModel default_contour() {
  ContourModel c;
  c.Q = 8;
  c.m = VecD(8);
  c.n = VecD(8);
  c.m << 2.05, -0.002, 0.5, 0.0, 0.056, 0.001, -0.125, 0.003;
  c.n << 1.24, -0.001, 0.335, -0.001, 0.124, -0.001, 0.018, 0.0;
  return c;
}

inline TargetPose default_pose() {
  TargetPose p;
  p.d_o = 27.0;
  p.phi_o = 0.0;
  p.varphi = 0.0;
  return p;
}

inline ContourModel unit_circle() {
  ContourModel c;
  c.Q = 1;
  c.m = VecD::Constant(1, 1.0);
  c.n = VecD::Constant(1, 1.0);
  return c;
}

/// Random star-like contour with bounded radius, safe for poses d_o >= 10.
inline ContourModel random_contour(Rng& rng, int max_Q = 8) {
  ContourModel c;
  c.Q = 1 + static_cast<int>(rng.below(max_Q));
  c.m = VecD(c.Q);
  c.n = VecD(c.Q);
  // A dominant first harmonic keeps the contour star-like (non-degenerate,
  // no self-intersection) while higher harmonics perturb it.
  c.m(0) = rng.uniform(0.8, 2.5);
  c.n(0) = rng.uniform(0.8, 2.5);
  for (int q = 1; q < c.Q; ++q) {
    const double scale = 0.25 / (q + 1);
    c.m(q) = rng.uniform(-scale, scale);
    c.n(q) = rng.uniform(-scale, scale);
  }
  return c;
}

inline TargetPose random_pose(Rng& rng) {
  TargetPose p;
  p.d_o = rng.uniform(10.0, 60.0);
  p.phi_o = rng.uniform(-1.2, 1.2);
  p.varphi = rng.uniform(-kPi, kPi);
  return p;
}

/// Random Hermitian PSD covariance with trace ~ P_t, never near-singular.
inline MatC random_covariance(Rng& rng, int n, double P_t) {
  const MatC l = rng.cgaussian_matrix(n, n);
  MatC r = l * l.adjoint();
  r += 0.05 * std::real(r.trace()) / n * MatC::Identity(n, n);
  r *= P_t / std::real(r.trace());
  return (r + r.adjoint()) / 2.0;
}

}  // namespace isac::testing

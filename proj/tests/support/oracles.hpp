// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// oracles.hpp: independent reference implementations used only by tests.
//
// Each oracle re-derives a quantity through a different algorithm than the
// library (finite differences instead of analytic derivatives, brute-force
// ray casting instead of bearing binning, first-order splitting instead of
// interior point), so agreement is meaningful evidence.

#pragma once

#include <vector>

#include "core/array.hpp"
#include "core/contour.hpp"
#include "core/crb.hpp"
#include "core/jacobians.hpp"

namespace isac::testing {

/// Central finite difference of a steering vector (step in radians).
VecC fd_steering_deriv(int elements, double phi, double step);

/// Central finite differences of d_k and phi_k w.r.t. [d_o, phi_o, varphi]
/// at fixed local points r_k (the same convention pose_jacobians uses).
std::vector<PoseJacobian> fd_pose_jacobians(const LosPartition& partition,
                                            const TargetPose& pose,
                                            double step);

/// Brute-force visible arc length: for each of `samples` contour points,
/// tests the sight line against every polyline segment (bearing buckets
/// only prune provably non-straddling segments) and accumulates a Riemann
/// sum of finite-difference arc speed over the visible set.
double ray_cast_visible_arclength(const ContourModel& model,
                                  const TargetPose& pose, int samples);

/// A synthetic one-subsection partition describing a point-like scatterer
/// at the pose center with the given arc-length weight. Used to exercise
/// the CRB machinery in the regime where closed form and Fisher oracle
/// must agree exactly.
LosPartition make_point_partition(const TargetPose& pose, double l_1);

/// CRB(phi_o) assembled directly from the 4x4 [g; d_o, phi_o, varphi]
/// Fisher matrix: invert the full matrix (pseudo-inverse on its null
/// space) and read the phi_o diagonal entry. Independent of efim_schur.
double crb_phi_from_full_fim(const FimBlocks& blocks);

}  // namespace isac::testing

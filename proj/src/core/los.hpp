// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// los.hpp: line-of-sight contour determination and K-subsection partition.
//
// The base station at the origin sees only part of the target contour. The
// visible (line-of-sight) part is found by ray casting, reduced to the
// largest contiguous local-angle interval [u_lower, u_upper], and split
// into K equal sub-intervals. Each subsection carries the representative
// quantities (midpoint direction, arc length, range, bearing, positions)
// that the Fisher-information computations consume.

#pragma once

#include <string>
#include <vector>

#include "contour.hpp"

namespace isac {

/// One subsection of the line-of-sight contour.
struct LosSubsection {
  double u_k = 0.0;    ///< representative local direction (interval midpoint)
  double l_k = 0.0;    ///< subsection arc length [m]
  double d_k = 0.0;    ///< range of representative point [m]
  double phi_k = 0.0;  ///< global bearing of representative point [rad]
  Vec2 r_k;            ///< representative point, local frame [m]
  Vec2 p_k;            ///< representative point, global frame [m]
};

/// Ordered partition of the line-of-sight interval.
struct LosPartition {
  std::vector<LosSubsection> subsections;
  double u_lower = 0.0;  ///< LoS interval start (local angle, radians)
  double u_upper = 0.0;  ///< LoS interval end; u_upper >= u_lower (unwrapped)
  bool contiguous = true;  ///< false if the visible set had several components
  std::vector<std::string> warnings;

  double total_arc_length() const;
};

/// Arc length of the contour over [u_a, u_b] by adaptive Simpson quadrature
/// of ||dr/du|| (rotation-invariant, so the local derivative suffices).
double arc_length(const ContourModel& model, double u_a, double u_b,
                  double rel_tol = 1e-10);

/// True if the straight path from the base station (origin) to the contour
/// point at local angle u is unobstructed by the rest of the contour.
/// Exact segment-intersection test against a dense polyline of the contour.
bool line_of_sight_clear(const ContourModel& model, const TargetPose& pose,
                         double u, int polyline_samples = 4096);

/// Determines the visible contour and partitions it into K subsections.
///
/// Visibility at sample resolution uses bearing-binned minimum-range ray
/// casting; the largest contiguous visible run is kept (a warning records
/// any discarded components) and its endpoints are polished by bisection on
/// the exact per-point visibility predicate, so the interval does not
/// depend on the sample count once converged.
///
/// Throws kNoVisibleContour if nothing is visible, kBadInput on invalid
/// arguments (K < 1 or sampling < 1000).
LosPartition compute_los_partition(const ContourModel& model,
                                   const TargetPose& pose, int K,
                                   int sampling = 4096);

}  // namespace isac

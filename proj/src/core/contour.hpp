// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// contour.hpp: truncated-Fourier-series target contours and poses.
//
// A star-like extended target is described in local coordinates by a
// truncated Fourier series r(u) = [sum_q m_q cos(qu); sum_q n_q sin(qu)],
// u in [0, 2pi). A pose places it in the global frame: the center sits at
// p_o = (d_o sin phi_o, d_o cos phi_o) — bearings are measured from the
// +y boresight of the base station at the origin — and the local frame is
// rotated by the orientation angle varphi.

#pragma once

#include <vector>

#include "common.hpp"
#include "errors.hpp"

namespace isac {

/// Truncated-Fourier-series contour coefficients (meters).
struct ContourModel {
  int Q = 0;  ///< series order; m and n both have length Q
  VecD m;     ///< cosine coefficients (x-component)
  VecD n;     ///< sine coefficients (y-component)

  /// Throws kBadInput if sizes disagree, Q < 1, or coefficients are not finite.
  void validate() const;
  /// Largest contour radius max_u ||r(u)|| (dense sampling + refinement).
  double max_radius() const;
};

/// Global placement of the target relative to the base station.
struct TargetPose {
  double d_o = 0.0;     ///< center range [m], > 0
  double phi_o = 0.0;   ///< center direction [rad], in (-pi/2, pi/2)
  double varphi = 0.0;  ///< orientation [rad]

  /// Throws kBadInput on out-of-range values or if the base station would
  /// sit inside the contour (d_o must exceed the max contour radius).
  void validate(const ContourModel& model) const;
  /// Center position p_o = (d_o sin phi_o, d_o cos phi_o).
  Vec2 center() const;
  /// Local-to-global rotation by varphi.
  Mat2 rotation() const;
};

/// Local contour point r(u).
Vec2 contour_point(const ContourModel& model, double u);

/// Local tangent dr/du (analytic derivative of the series).
Vec2 contour_deriv(const ContourModel& model, double u);

/// Global contour point p(u) = p_o + V r(u).
Vec2 global_point(const ContourModel& model, const TargetPose& pose, double u);

}  // namespace isac

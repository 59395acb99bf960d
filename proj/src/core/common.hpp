// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// common.hpp: shared aliases, physical constants, and unit conversions.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace isac {

using cd = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecD = Eigen::VectorXd;
using MatD = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
/// Speed of light in vacuum [m/s].
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Power ratio in dB to linear scale (10 dB -> 10x).
inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }

/// dBW to watts (0 dBW = 1 W) and dBm to watts (-80 dBm = 1e-11 W).
inline double dbw2watt(double dbw) { return db2lin(dbw); }
inline double dbm2watt(double dbm) { return db2lin(dbm - 30.0); }

inline double sq(double x) { return x * x; }

/// Counterclockwise rotation by `angle` radians.
inline Mat2 rotation2(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat2 v;
  v << c, -s, s, c;
  return v;
}

/// Counterclockwise quarter turn: maps (x, y) to (-y, x).
inline Mat2 rot90() {
  Mat2 j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

/// Bearing of a point measured from the +y boresight toward +x,
/// consistent with a base station looking along +y: phi = atan2(x, y).
inline double bearing(const Vec2& p) { return std::atan2(p.x(), p.y()); }

}  // namespace isac

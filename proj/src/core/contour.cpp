// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// contour.cpp: see contour.hpp.

#include "contour.hpp"

#include <cmath>

namespace isac {

void ContourModel::validate() const {
  require(Q >= 1, "contour order Q must be >= 1");
  require(m.size() == Q && n.size() == Q,
          "contour coefficient lists m, n must both have length Q");
  require(m.allFinite() && n.allFinite(),
          "contour coefficients must be finite");
}

double ContourModel::max_radius() const {
  // The radius is a trigonometric polynomial of order Q; sampling well above
  // Nyquist and polishing the best sample with a golden-section step gives
  // far more accuracy than the validation use cases need.
  const int samples = 64 * Q + 64;
  double best_u = 0.0, best = contour_point(*this, 0.0).norm();
  for (int i = 1; i < samples; ++i) {
    const double u = 2.0 * kPi * i / samples;
    const double r = contour_point(*this, u).norm();
    if (r > best) {
      best = r;
      best_u = u;
    }
  }
  double lo = best_u - 2.0 * kPi / samples;
  double hi = best_u + 2.0 * kPi / samples;
  constexpr double kGolden = 0.61803398874989484820;
  for (int it = 0; it < 80; ++it) {
    const double a = hi - kGolden * (hi - lo);
    const double b = lo + kGolden * (hi - lo);
    if (contour_point(*this, a).norm() < contour_point(*this, b).norm())
      lo = a;
    else
      hi = b;
  }
  const double polished = contour_point(*this, 0.5 * (lo + hi)).norm();
  return std::max(best, polished);
}

void TargetPose::validate(const ContourModel& model) const {
  require(std::isfinite(d_o) && d_o > 0.0, "center range d_o must be > 0");
  require(std::isfinite(phi_o) && std::abs(phi_o) < kPi / 2.0,
          "center direction phi_o must lie in (-pi/2, pi/2)");
  require(std::isfinite(varphi), "orientation varphi must be finite");
  const double r_max = model.max_radius();
  require(d_o > r_max,
          "center range d_o must exceed the contour's maximum radius (the "
          "base station cannot sit inside the target)");
}

Vec2 TargetPose::center() const {
  return Vec2(d_o * std::sin(phi_o), d_o * std::cos(phi_o));
}

Mat2 TargetPose::rotation() const { return rotation2(varphi); }

Vec2 contour_point(const ContourModel& model, double u) {
  double x = 0.0, y = 0.0;
  for (int q = 1; q <= model.Q; ++q) {
    x += model.m(q - 1) * std::cos(q * u);
    y += model.n(q - 1) * std::sin(q * u);
  }
  return Vec2(x, y);
}

Vec2 contour_deriv(const ContourModel& model, double u) {
  double x = 0.0, y = 0.0;
  for (int q = 1; q <= model.Q; ++q) {
    x -= model.m(q - 1) * q * std::sin(q * u);
    y += model.n(q - 1) * q * std::cos(q * u);
  }
  return Vec2(x, y);
}

Vec2 global_point(const ContourModel& model, const TargetPose& pose,
                  double u) {
  return pose.center() + pose.rotation() * contour_point(model, u);
}

}  // namespace isac

// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// jacobians.cpp: see jacobians.hpp.

#include "jacobians.hpp"

#include <cmath>

namespace isac {

std::vector<PoseJacobian> pose_jacobians(const LosPartition& partition,
                                         const TargetPose& pose,
                                         JacobianMode mode) {
  const Mat2 v = pose.rotation();
  const Mat2 j90 = rot90();
  const Vec2 p_o = pose.center();
  const Vec2 p_perp = j90 * p_o;
  // Position derivatives shared by all subsections:
  //   dp/d(d_o)    = e       (unit vector toward the center)
  //   dp/d(phi_o)  = d_o * e_perp
  //   dp/d(varphi) = dV/d(varphi) r_k = V J90 r_k
  const Vec2 e(std::sin(pose.phi_o), std::cos(pose.phi_o));
  const Vec2 e_perp(std::cos(pose.phi_o), -std::sin(pose.phi_o));

  std::vector<PoseJacobian> out;
  out.reserve(partition.subsections.size());
  for (const auto& s : partition.subsections) {
    PoseJacobian jac;
    if (mode == JacobianMode::kExact) {
      const Vec2 dp_dvarphi = v * (j90 * s.r_k);
      // d||p||/dx = p/||p||; d(bearing)/dx = (p_y, -p_x)/||p||^2.
      const Vec2 p_hat = s.p_k / s.d_k;
      const Vec2 w(s.p_k.y(), -s.p_k.x());
      jac.mu = Eigen::Vector3d(p_hat.dot(e), pose.d_o * p_hat.dot(e_perp),
                               p_hat.dot(dp_dvarphi));
      jac.eta = Eigen::Vector3d(w.dot(e), pose.d_o * w.dot(e_perp),
                                w.dot(dp_dvarphi)) /
                (s.d_k * s.d_k);
    } else {
      const double x = s.r_k.dot(v.transpose() * p_perp) / pose.d_o;
      jac.mu = Eigen::Vector3d(1.0, x, -x);
      jac.eta = Eigen::Vector3d(0.0, 1.0, 0.0);
    }
    out.push_back(jac);
  }
  return out;
}

}  // namespace isac

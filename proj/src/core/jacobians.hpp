// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// jacobians.hpp: sensitivities of subsection range/bearing to the pose.
//
// For the pose parameter vector kappa = [d_o, phi_o, varphi], each
// subsection's representative point p_k = p_o + V r_k (r_k held fixed)
// has range d_k = ||p_k|| and bearing phi_k. The Fisher-information
// assembly needs mu_k = d(d_k)/d(kappa) and eta_k = d(phi_k)/d(kappa).

#pragma once

#include <vector>

#include "los.hpp"

namespace isac {

enum class JacobianMode {
  kExact,        ///< true analytic derivatives of d_k and phi_k
  kApproximate,  ///< far-field approximation: mu ~ [1, x, -x], eta = [0,1,0]
};

struct PoseJacobian {
  Eigen::Vector3d mu;   ///< d(d_k)/d([d_o, phi_o, varphi])
  Eigen::Vector3d eta;  ///< d(phi_k)/d([d_o, phi_o, varphi])
};

/// Per-subsection pose sensitivities.
///
/// Exact mode projects the analytic position derivatives onto the range
/// and bearing gradients. Approximate mode is the far-field simplification
/// (valid for d_o >> ||r_k||): mu_k ~ [1, r_kT VT p_perp / d_o,
/// -r_kT VT p_perp / d_o] with p_perp the quarter-turn of p_o, and
/// eta_k = [0, 1, 0] exactly.
std::vector<PoseJacobian> pose_jacobians(const LosPartition& partition,
                                         const TargetPose& pose,
                                         JacobianMode mode);

}  // namespace isac

// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// crb.hpp: Cramér-Rao bound on the target direction.
//
// Two independent routes to CRB(phi_o):
//  * crb_phi_closed_form — the closed-form expression used by the
//    optimizer: one bracket per subsection combining transmit beampattern
//    power, derivative power, and their cross term.
//  * crb_phi_oracle — assembles the full Fisher-information blocks over
//    [path loss; d_o, phi_o, varphi], reduces them by a Schur complement,
//    and inverts; used to validate the closed form.

#pragma once

#include "array.hpp"
#include "jacobians.hpp"
#include "los.hpp"

namespace isac {

/// Sensing-link parameters.
struct SensingParams {
  double g = 1.0;         ///< two-way path-loss amplitude coefficient (1/d_o^2)
  double sigma_s2 = 1.0;  ///< sensing noise power [W]
  double t_s = 1.0;       ///< observation period [s]
  double B = 1e8;         ///< effective bandwidth [Hz]

  void validate() const {
    require(g > 0.0 && sigma_s2 > 0.0 && t_s > 0.0 && B > 0.0,
            "sensing parameters must be strictly positive");
  }
};

/// Fisher information blocks for the extended parameter [g; d_o, phi_o,
/// varphi]: the pose block, the path-loss scalar, and their coupling.
struct FimBlocks {
  Eigen::Matrix3d I_k1 = Eigen::Matrix3d::Zero();
  double i_g = 0.0;
  Eigen::Vector3d i_k1g = Eigen::Vector3d::Zero();
};

/// Per-subsection diagnostics of the closed-form bracket.
struct CrbTermK {
  double l_k = 0.0;        ///< arc length weight
  double A_k = 0.0;        ///< a_k^H R_x a_k (beampattern power)
  double B_k = 0.0;        ///< adot_k^H R_x adot_k
  double C_k = 0.0;        ///< 2 Re(adot_k^H R_x a_k)
  double Z1_k = 0.0;       ///< receive-side derivative-power factor at phi_k
  double bracket = 0.0;    ///< Z1_k A_k + B_k - C_k^2 / (4 A_k)
  double bracket_tx = 0.0; ///< optimizer form: (|adot|^2/|b|^2) A_k + B_k - ...
};

/// Bundled result of a CRB evaluation.
struct CrbResult {
  double crb_phi_closed = 0.0;           ///< closed-form CRB [rad^2]
  double crb_phi_oracle = 0.0;           ///< Fisher-oracle CRB [rad^2]
  Eigen::Matrix3d crb_k1_matrix;         ///< oracle EFIM inverse
  double Z1 = 0.0;                       ///< scalar diagnostic at varphi
  double Z2 = 0.0;
  std::vector<CrbTermK> terms;
};

/// pi^2 (N_r^2 - 1) cos^2(angle) / 12.
double compute_Z1(int N_r, double angle);
/// (4 pi B / c)^2.
double compute_Z2(double B);
/// Squared contour-harmonic projection at subsection k (diagnostic only).
double compute_Xk(const LosPartition& partition, const TargetPose& pose,
                  const ContourModel& model, int k);

/// Closed-form CRB(phi_o). Throws kDegenerateBeampattern when some
/// a_k^H R_x a_k <= eps (default 1e-12 * trace R_x): the beampattern puts
/// no power on that subsection. Throws kBadInput on a zero-length
/// partition. If `terms` is non-null, per-k diagnostics are appended.
double crb_phi_closed_form(const LosPartition& partition, const MatC& R_x,
                           const SensingParams& params,
                           const ArrayGeometry& geometry,
                           std::vector<CrbTermK>* terms = nullptr);

/// Fisher-information blocks of the pose/path-loss parameters.
FimBlocks assemble_fim_blocks(const LosPartition& partition,
                              const TargetPose& pose,
                              const ContourModel& model, const MatC& R_x,
                              const SensingParams& params,
                              const ArrayGeometry& geometry,
                              JacobianMode mode);

/// Effective Fisher information of the pose after eliminating the path
/// loss: J = I_k1 - i i^T / i_g. Throws kSingularPathLossInfo if i_g <= 0.
Eigen::Matrix3d efim_schur(const FimBlocks& blocks);

/// Oracle CRB(phi_o): middle diagonal entry of the EFIM inverse. Rank
/// deficiencies in directions that do not affect phi_o (e.g. an
/// unidentifiable orientation for a point target) are handled by a
/// pseudo-inverse; throws kSingularEfim when phi_o itself is affected.
/// If `crb_matrix` is non-null the full (pseudo-)inverse is stored there.
double crb_phi_oracle(const LosPartition& partition, const TargetPose& pose,
                      const ContourModel& model, const MatC& R_x,
                      const SensingParams& params,
                      const ArrayGeometry& geometry, JacobianMode mode,
                      Eigen::Matrix3d* crb_matrix = nullptr);

/// Convenience bundle of both routes plus diagnostics.
CrbResult evaluate_crb(const LosPartition& partition, const TargetPose& pose,
                       const ContourModel& model, const MatC& R_x,
                       const SensingParams& params,
                       const ArrayGeometry& geometry, JacobianMode mode);

}  // namespace isac

// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// crb.cpp: see crb.hpp.

#include "crb.hpp"

#include <cmath>

namespace isac {

namespace {

// Shared per-subsection quadratic forms against R_x.
struct Forms {
  double A = 0.0;  // a^H R a
  double B = 0.0;  // adot^H R adot
  double C = 0.0;  // 2 Re(adot^H R a)
};

Forms quad_forms(const ArrayGeometry& geometry, const MatC& R_x,
                 double phi_k) {
  const VecC a = steer_tx(geometry, phi_k);
  const VecC da = steer_tx_deriv(geometry, phi_k);
  Forms f;
  f.A = std::real(a.dot(R_x * a));    // Eigen dot conjugates the left side
  f.B = std::real(da.dot(R_x * da));
  f.C = 2.0 * std::real(da.dot(R_x * a));
  return f;
}

void check_preconditions(const LosPartition& partition, const MatC& R_x,
                         const SensingParams& params,
                         const ArrayGeometry& geometry) {
  params.validate();
  geometry.validate();
  require(!partition.subsections.empty(), "partition must not be empty");
  require(R_x.rows() == geometry.N_t && R_x.cols() == geometry.N_t,
          "R_x must be N_t x N_t");
  require((R_x - R_x.adjoint()).norm() <= 1e-8 * (1.0 + R_x.norm()),
          "R_x must be Hermitian");
}

double degenerate_eps(const MatC& R_x) {
  return 1e-12 * std::real(R_x.trace());
}

}  // namespace

double compute_Z1(int N_r, double angle) {
  return kPi * kPi * (static_cast<double>(N_r) * N_r - 1.0) *
         sq(std::cos(angle)) / 12.0;
}

double compute_Z2(double B) { return sq(4.0 * kPi * B / kSpeedOfLight); }

double compute_Xk(const LosPartition& partition, const TargetPose& pose,
                  const ContourModel& model, int k) {
  require(k >= 0 && k < static_cast<int>(partition.subsections.size()),
          "subsection index out of range");
  const double u_k = partition.subsections[k].u_k;
  double cos_sum = 0.0, sin_sum = 0.0;
  for (int q = 1; q <= model.Q; ++q) {
    cos_sum += model.m(q - 1) * std::cos(q * u_k);
    sin_sum += model.n(q - 1) * std::sin(q * u_k);
  }
  const double delta = pose.phi_o - pose.varphi;
  return sq(cos_sum * std::sin(delta) - sin_sum * std::cos(delta));
}

double crb_phi_closed_form(const LosPartition& partition, const MatC& R_x,
                           const SensingParams& params,
                           const ArrayGeometry& geometry,
                           std::vector<CrbTermK>* terms) {
  check_preconditions(partition, R_x, params, geometry);
  const double eps = degenerate_eps(R_x);
  double sum = 0.0;
  for (const auto& s : partition.subsections) {
    const Forms f = quad_forms(geometry, R_x, s.phi_k);
    if (f.A <= eps)
      fail(ErrorCode::kDegenerateBeampattern,
           "beampattern power a_k^H R_x a_k is numerically zero at phi_k=" +
               std::to_string(s.phi_k));
    const double z1 = compute_Z1(geometry.N_r, s.phi_k);
    const double bracket = z1 * f.A + f.B - f.C * f.C / (4.0 * f.A);
    sum += s.l_k * bracket;
    if (terms) {
      CrbTermK t;
      t.l_k = s.l_k;
      t.A_k = f.A;
      t.B_k = f.B;
      t.C_k = f.C;
      t.Z1_k = z1;
      t.bracket = bracket;
      const double da2 = steer_tx_deriv(geometry, s.phi_k).squaredNorm();
      const double b2 = steer_rx(geometry, s.phi_k).squaredNorm();
      t.bracket_tx = (da2 / b2) * f.A + f.B - f.C * f.C / (4.0 * f.A);
      terms->push_back(t);
    }
  }
  require(sum > 0.0, "partition carries no information (zero arc length)");
  const double scale = 2.0 * params.g * params.g * geometry.N_r * params.t_s /
                       params.sigma_s2;
  return 1.0 / (scale * sum);
}

FimBlocks assemble_fim_blocks(const LosPartition& partition,
                              const TargetPose& pose,
                              const ContourModel& model, const MatC& R_x,
                              const SensingParams& params,
                              const ArrayGeometry& geometry,
                              JacobianMode mode) {
  check_preconditions(partition, R_x, params, geometry);
  model.validate();
  const double eps = degenerate_eps(R_x);
  const auto jac = pose_jacobians(partition, pose, mode);
  const double z2 = compute_Z2(params.B);
  const double noise = params.sigma_s2;
  const double g = params.g;

  FimBlocks blocks;
  for (std::size_t k = 0; k < partition.subsections.size(); ++k) {
    const auto& s = partition.subsections[k];
    const Forms f = quad_forms(geometry, R_x, s.phi_k);
    if (f.A <= eps)
      fail(ErrorCode::kDegenerateBeampattern,
           "beampattern power a_k^H R_x a_k is numerically zero at phi_k=" +
               std::to_string(s.phi_k));
    const double z1 = compute_Z1(geometry.N_r, s.phi_k);
    const Eigen::Vector3d& mu = jac[k].mu;
    const Eigen::Vector3d& eta = jac[k].eta;
    // Pose block: the bandwidth (range) term carries no observation-period
    // factor — the spectrum normalization absorbs it — while the bearing
    // term scales with t_s. Kept exactly in this asymmetric form.
    blocks.I_k1 += (2.0 * g * g * geometry.N_r / noise) * s.l_k * f.A *
                   (z2 * (mu * mu.transpose()) +
                    (z1 + f.B / f.A) * params.t_s * (eta * eta.transpose()));
    blocks.i_g += (2.0 * geometry.N_r * params.t_s / noise) * s.l_k * f.A;
    blocks.i_k1g(1) +=
        (g * geometry.N_r * params.t_s / noise) * s.l_k * f.C;
  }
  return blocks;
}

Eigen::Matrix3d efim_schur(const FimBlocks& blocks) {
  if (!(blocks.i_g > 0.0))
    fail(ErrorCode::kSingularPathLossInfo,
         "path-loss Fisher scalar i_g must be positive");
  return blocks.I_k1 -
         (blocks.i_k1g * blocks.i_k1g.transpose()) / blocks.i_g;
}

double crb_phi_oracle(const LosPartition& partition, const TargetPose& pose,
                      const ContourModel& model, const MatC& R_x,
                      const SensingParams& params,
                      const ArrayGeometry& geometry, JacobianMode mode,
                      Eigen::Matrix3d* crb_matrix) {
  const FimBlocks blocks =
      assemble_fim_blocks(partition, pose, model, R_x, params, geometry, mode);
  const Eigen::Matrix3d efim = efim_schur(blocks);

  // Invert through a symmetric eigendecomposition so that exactly
  // unidentifiable directions (zero eigenvalues) can be excised when they
  // are orthogonal to phi_o.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(efim);
  const Eigen::Vector3d lam = eig.eigenvalues();
  const Eigen::Matrix3d q = eig.eigenvectors();
  const double lam_max = lam.cwiseAbs().maxCoeff();
  if (!(lam_max > 0.0))
    fail(ErrorCode::kSingularEfim, "effective Fisher information is zero");

  const double drop_tol = 1e-12 * lam_max;
  double crb = 0.0;
  double dropped_phi_mass = 0.0;
  Eigen::Matrix3d pinv = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    const double qi_phi = q(1, i);  // phi_o is the middle parameter
    if (lam(i) <= drop_tol) {
      dropped_phi_mass += qi_phi * qi_phi;
      continue;
    }
    crb += qi_phi * qi_phi / lam(i);
    pinv += q.col(i) * q.col(i).transpose() / lam(i);
  }
  if (dropped_phi_mass > 1e-6)
    fail(ErrorCode::kSingularEfim,
         "effective Fisher information is singular in the phi_o direction "
         "(condition number exceeds 1e12)");
  if (crb_matrix) *crb_matrix = pinv;
  return crb;
}

CrbResult evaluate_crb(const LosPartition& partition, const TargetPose& pose,
                       const ContourModel& model, const MatC& R_x,
                       const SensingParams& params,
                       const ArrayGeometry& geometry, JacobianMode mode) {
  CrbResult result;
  result.crb_phi_closed =
      crb_phi_closed_form(partition, R_x, params, geometry, &result.terms);
  result.crb_phi_oracle = crb_phi_oracle(partition, pose, model, R_x, params,
                                         geometry, mode,
                                         &result.crb_k1_matrix);
  result.Z1 = compute_Z1(geometry.N_r, pose.varphi);
  result.Z2 = compute_Z2(params.B);
  return result;
}

}  // namespace isac

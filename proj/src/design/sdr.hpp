// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// sdr.hpp: transmit-covariance design by semidefinite relaxation.
//
// The design problem: split the transmit covariance into per-user parts
// R_x = sum_c R_c, maximize the weighted per-subsection Fisher bracket
// sum (equivalently minimize the direction CRB) subject to per-user SINR,
// a total power cap, and an optional 3-dB beam-coverage condition over
// the illuminated subsections. Each bracket bound becomes a 2x2 Schur
// block, so the whole program is a small dense SDP handled by the conic
// module. A randomized extraction then recovers one beamformer per user
// from the relaxed covariances, with per-epoch rescaling that restores
// the SINR constraints with equality.
//
// The same machinery also builds two reconstructed benchmark designs that
// least-squares match an ideal flat main-beam pattern instead of
// optimizing the bound (one with a power cap, one forced to full power);
// they exist for comparison plots and are labeled "reconstructed"
// wherever they surface.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conic/problem.hpp"
#include "core/array.hpp"
#include "core/crb.hpp"
#include "core/los.hpp"

namespace isac {

/// Power, SINR, and coverage requirements for the transmit design.
struct DesignConstraints {
  double P_t = 1.0;              ///< total transmit power cap [W]
  double Gamma = 1.0;            ///< per-user SINR threshold (linear)
  bool coverage_enabled = true;  ///< enforce 3-dB coverage across subsections
  ChannelSet channels;           ///< downlink channels + noise powers

  void validate() const;
};

/// The assembled covariance SDP plus the variable handles and weights
/// needed to interpret its solution.
struct SdrProblem {
  conic::ConicProblem problem;
  std::vector<conic::MatrixVarId> R_vars;  ///< per-user covariance parts
  std::vector<conic::ScalarVarId> t_vars;  ///< per-subsection bracket bounds
  conic::ScalarVarId t_min_var;            ///< coverage floor (always present)
  VecD l;                                  ///< subsection arc weights
  VecD t_scale;                            ///< bound-variable units, per k
  int N_t = 0;
};

/// Solved relaxation. For the bound-maximizing design, `objective` is the
/// weighted bracket sum sum_k l_k t_k and t_k/t_min are populated; for the
/// benchmark designs, `objective` is the least-squares pattern error and
/// t_k is empty.
struct SdrSolution {
  conic::SolveStatus status = conic::SolveStatus::kNumericalFailure;
  std::string detail;

  std::vector<MatC> R_c;  ///< per-user covariance parts (Hermitian)
  MatC R_x;               ///< total transmit covariance, sum of R_c
  VecD t_k;
  double t_min = 0.0;
  double objective = 0.0;
  std::vector<bool> rank_one;  ///< check_rank_one per R_c

  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  VecD certificate_y, certificate_z;  ///< infeasibility certificate, if any
};

/// How the returned beamformers were obtained.
enum class BeamformerProvenance {
  kDirectEigenvector,  ///< every R_c was rank-one; w_c = sqrt(lambda_1) v_1
  kRandomized,         ///< best coverage-feasible epoch by CRB
  kCoverageFallback,   ///< no epoch met coverage; best coverage margin
};

const char* beamformer_provenance_name(BeamformerProvenance p);

/// One beamformer per user plus the diagnostics of how it was selected.
struct BeamformerSet {
  MatC W;  ///< N_t x C, column c serves user c
  BeamformerProvenance provenance = BeamformerProvenance::kDirectEigenvector;
  int epoch = -1;            ///< selected epoch (randomized provenances)
  int epochs_total = 0;      ///< epochs attempted
  int epochs_rejected = 0;   ///< rejected by singular/negative/violated checks
  int epochs_feasible = 0;   ///< accepted epochs meeting the coverage test
  double crb = 0.0;          ///< direction CRB of W's covariance [rad^2]
  double coverage_margin = 0.0;  ///< 2 min_k - max_k of subsection power
  VecD sinr;                 ///< achieved per-user SINR
  double power = 0.0;        ///< trace(W W^H) [W]
};

/// Extraction tuning.
struct ExtractionOptions {
  int N_e = 100;               ///< randomization epochs
  std::uint64_t seed = 0;      ///< master seed for the epoch streams
  double epsilon_rank = 1e-6;  ///< rank-one test: lambda_2 <= eps * lambda_1
  bool eigenvector_only = false;  ///< draw top eigenvectors instead of
                                  ///< Gaussian span samples
  double power_slack = 1e-6;   ///< reject epochs above P_t * (1 + slack)
  double sinr_slack = 1e-8;    ///< reject epochs off Gamma by this (relative)
};

/// Pattern-matching benchmark variants.
enum class DesignVariant {
  kCrbMin,  ///< bound-maximizing design (the main algorithm)
  kBp1,     ///< least-squares beampattern match under the power cap
  kBp2,     ///< same with full power forced (trace R_x = P_t)
};

const char* design_variant_name(DesignVariant v);

/// From-scratch re-evaluation of every design constraint at a solution.
struct SdrAudit {
  double power = 0.0;             ///< trace(R_x)
  double power_violation = 0.0;   ///< max(0, power - P_t) / P_t
  double worst_sinr_violation = 0.0;  ///< max scaled C2 shortfall
  double worst_block_eig = 0.0;   ///< most negative scaled Schur-block eig
  double coverage_margin = 0.0;   ///< 2 min_k - max_k of subsection power
  double coverage_violation = 0.0;  ///< max(0, -margin) / max_k

  bool pass(double tol) const {
    return power_violation <= tol && worst_sinr_violation <= tol &&
           worst_block_eig >= -tol && coverage_violation <= tol;
  }
};

/// Assembles the covariance SDP: one Hermitian PSD variable per user
/// (a single one when there are no users), one bracket bound per
/// subsection, a coverage floor variable, SINR rows, the power row, and
/// the coverage rows when enabled. Construction is total for valid input;
/// throws kBadInput when the partition is empty or C > N_t.
SdrProblem build_sdr_problem(const LosPartition& partition,
                             const ArrayGeometry& geometry,
                             const DesignConstraints& constraints);

/// Solves the relaxation and unpacks covariances, bounds, and rank flags.
SdrSolution solve_sdr(const SdrProblem& sp,
                      const conic::SolveOptions& options = {});

/// True iff lambda_2 <= epsilon_rank * lambda_1 (rank-one up to tolerance).
bool check_rank_one(const MatC& R_c, double epsilon_rank = 1e-6);

/// Achieved downlink SINR of each user under beamformer columns W.
VecD evaluate_sinr(const MatC& W, const ChannelSet& channels);

/// 2 min_k - max_k of the subsection beampattern power a_k^H R_x a_k;
/// nonnegative exactly when the 3-dB coverage condition holds.
double coverage_margin(const LosPartition& partition,
                       const ArrayGeometry& geometry, const MatC& R_x);

/// Recovers one beamformer per user from the relaxed covariances.
///
/// If every R_c is rank-one the top eigenvectors are returned directly.
/// Otherwise, per epoch: draw u_c in the span of R_c (matrix square root
/// times a standard complex Gaussian, normalized), solve the CxC linear
/// system that restores every SINR to exactly Gamma, reject the epoch if
/// the system is singular, any power share is nonpositive, or the power
/// cap/SINR checks fail; among accepted epochs prefer the coverage-feasible
/// one with the smallest CRB, falling back to the best coverage margin
/// (flagged) when none is coverage-feasible. Throws kExtractionFailed when
/// every epoch is rejected.
BeamformerSet extract_rank_one(const SdrSolution& solution,
                               const LosPartition& partition,
                               const ArrayGeometry& geometry,
                               const DesignConstraints& constraints,
                               const SensingParams& sensing,
                               const ExtractionOptions& options);

/// Least-squares beampattern benchmark (kBp1/kBp2): fit alpha * P_des to
/// the transmit beampattern over a uniform angle grid, P_des flat over a
/// main beam of `beamwidth_deg` centered on phi_o (radians) and zero
/// elsewhere, subject to SINR rows and the power cap (kBp2: power
/// equality). The returned solution has t_k empty and `objective` = fit
/// error; pass it through extract_rank_one for beamformers.
SdrSolution benchmark_beampattern_design(DesignVariant variant,
                                         double phi_o,
                                         const ArrayGeometry& geometry,
                                         const DesignConstraints& constraints,
                                         const conic::SolveOptions& options,
                                         double beamwidth_deg = 10.0,
                                         double grid_step_deg = 1.0);

/// Re-evaluates power, SINR, Schur-block, and coverage conditions of a
/// solution from scratch (independent of solver bookkeeping).
SdrAudit audit_sdr_solution(const SdrSolution& solution,
                            const LosPartition& partition,
                            const ArrayGeometry& geometry,
                            const DesignConstraints& constraints);

}  // namespace isac

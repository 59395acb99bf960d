// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// sdr.cpp: see sdr.hpp.

#include "sdr.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "core/rng.hpp"

namespace isac {

namespace {

using conic::LinExpr;
using conic::MatrixVarId;
using conic::ScalarVarId;
using conic::Sense;

/// Hermitian coefficient of Re(u^H X v) for Hermitian X: (u v^H + v u^H)/2.
MatC cross_coeff(const VecC& u, const VecC& v) {
  const MatC m = u * v.adjoint();
  return 0.5 * (m + m.adjoint());
}

/// Per-subsection steering data reused by several constraint families.
struct SubsectionArrays {
  VecC a, adot;
  double coef_tx = 0.0;  ///< |adot|^2 / |b|^2 at this bearing
};

std::vector<SubsectionArrays> subsection_arrays(
    const LosPartition& partition, const ArrayGeometry& geometry) {
  std::vector<SubsectionArrays> out(partition.subsections.size());
  for (size_t k = 0; k < partition.subsections.size(); ++k) {
    const double phi = partition.subsections[k].phi_k;
    out[k].a = steer_tx(geometry, phi);
    out[k].adot = steer_tx_deriv(geometry, phi);
    const VecC b = steer_rx(geometry, phi);
    out[k].coef_tx = out[k].adot.squaredNorm() / b.squaredNorm();
  }
  return out;
}

/// Expression sum_c <coeff, R_c> over all covariance parts.
LinExpr total_quad(const std::vector<MatrixVarId>& R_vars, const MatC& coeff) {
  LinExpr e;
  for (const MatrixVarId v : R_vars) e.add(v, coeff);
  return e;
}

/// Eigendecomposition-based principal square root of a Hermitian PSD
/// matrix; small negative eigenvalues from roundoff are clipped.
MatC psd_sqrt(const MatC& x) {
  Eigen::SelfAdjointEigenSolver<MatC> eig(x);
  const VecD lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * lam.asDiagonal() *
         eig.eigenvectors().adjoint();
}

/// Rotates a vector so its largest-magnitude entry is real positive, which
/// pins the arbitrary global phase of an eigenvector deterministically.
void canonicalize_phase(VecC& v) {
  int at = 0;
  v.cwiseAbs().maxCoeff(&at);
  const double mag = std::abs(v[at]);
  if (mag > 0.0) v *= std::conj(v[at]) / mag;
}

double subsection_power_min(const std::vector<SubsectionArrays>& arrays,
                            const MatC& R_x, double* max_out) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const SubsectionArrays& sa : arrays) {
    const double p = std::real(sa.a.dot(R_x * sa.a));
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  if (max_out) *max_out = hi;
  return lo;
}

}  // namespace

void DesignConstraints::validate() const {
  require(P_t > 0.0, "total power must be positive");
  require(Gamma > 0.0, "SINR threshold must be positive");
  channels.validate();
}

const char* beamformer_provenance_name(BeamformerProvenance p) {
  switch (p) {
    case BeamformerProvenance::kDirectEigenvector:
      return "direct-eigenvector";
    case BeamformerProvenance::kRandomized:
      return "randomized";
    case BeamformerProvenance::kCoverageFallback:
      return "coverage-fallback";
  }
  return "unknown";
}

const char* design_variant_name(DesignVariant v) {
  switch (v) {
    case DesignVariant::kCrbMin:
      return "crb-min";
    case DesignVariant::kBp1:
      return "bp1";
    case DesignVariant::kBp2:
      return "bp2";
  }
  return "unknown";
}

SdrProblem build_sdr_problem(const LosPartition& partition,
                             const ArrayGeometry& geometry,
                             const DesignConstraints& constraints) {
  geometry.validate();
  constraints.validate();
  const int K = static_cast<int>(partition.subsections.size());
  const int C = constraints.channels.users();
  require(K >= 1, "partition must have at least one subsection");
  require(C <= geometry.N_t,
          "cannot serve more users than transmit antennas");
  for (const VecC& h : constraints.channels.h)
    require(h.size() == geometry.N_t, "channel length must equal N_t");

  SdrProblem sp;
  sp.N_t = geometry.N_t;
  sp.l.resize(K);

  // With no users the covariance is a single undivided variable; the SINR
  // rows simply do not exist.
  if (C == 0) {
    sp.R_vars.push_back(sp.problem.add_hermitian_var("R_x", geometry.N_t));
  } else {
    for (int c = 0; c < C; ++c)
      sp.R_vars.push_back(sp.problem.add_hermitian_var(
          "R[" + std::to_string(c) + "]", geometry.N_t));
  }
  for (const MatrixVarId v : sp.R_vars) sp.problem.require_psd(v);

  for (int k = 0; k < K; ++k)
    sp.t_vars.push_back(
        sp.problem.add_scalar_var("t[" + std::to_string(k) + "]"));
  sp.t_min_var = sp.problem.add_scalar_var("t_min");

  const std::vector<SubsectionArrays> arrays =
      subsection_arrays(partition, geometry);

  sp.t_scale.resize(K);
  LinExpr objective;
  for (int k = 0; k < K; ++k) {
    sp.l[k] = partition.subsections[k].l_k;

    const MatC aa = arrays[k].a * arrays[k].a.adjoint();
    const MatC dd = arrays[k].adot * arrays[k].adot.adjoint();
    const MatC cr = cross_coeff(arrays[k].adot, arrays[k].a);

    // The corner coefficient grows like N_t^3 while the power row stays
    // O(N_t); left alone that spread costs the solver digits. Balance the
    // block by the congruence diag(1/sqrt(s), 1) — exactly equivalent —
    // and express the bound variable in units of s so its column stays
    // O(1) too.
    const double s_k = std::max(
        1.0, arrays[k].coef_tx * geometry.N_t + arrays[k].adot.squaredNorm());
    sp.t_scale[k] = s_k;
    objective.add(sp.t_vars[k], -sp.l[k] * s_k);

    LinExpr power_k = total_quad(sp.R_vars, aa);          // a^H R_x a
    LinExpr cross_k =                                     // Re(adot^H R_x a)
        total_quad(sp.R_vars, MatC(cr / std::sqrt(s_k)));
    LinExpr corner;                                       // top-left entry
    corner =
        total_quad(sp.R_vars, MatC((arrays[k].coef_tx * aa + dd) / s_k));
    corner.add(sp.t_vars[k], -1.0);

    sp.problem.add_lmi("schur_bound[" + std::to_string(k) + "]",
                       {{corner, cross_k}, {cross_k, power_k}});

    if (constraints.coverage_enabled) {
      LinExpr floor_k = power_k;
      floor_k.add(sp.t_min_var, -1.0);
      sp.problem.add_linear("coverage_floor[" + std::to_string(k) + "]",
                            floor_k, Sense::kGe, 0.0);
      LinExpr cap_k = power_k;
      cap_k.add(sp.t_min_var, -2.0);
      sp.problem.add_linear("coverage_cap[" + std::to_string(k) + "]", cap_k,
                            Sense::kLe, 0.0);
    }
  }

  for (int c = 0; c < C; ++c) {
    const VecC& h = constraints.channels.h[c];
    const MatC hh = h * h.adjoint();
    LinExpr sinr;
    for (int i = 0; i < C; ++i) {
      const MatC coeff = (i == c) ? MatC(hh / constraints.Gamma) : MatC(-hh);
      sinr.add(sp.R_vars[i], coeff);
    }
    sp.problem.add_linear("sinr[" + std::to_string(c) + "]", sinr, Sense::kGe,
                          constraints.channels.sigma2[c]);
  }

  sp.problem.add_linear("power",
                        total_quad(sp.R_vars, MatC(MatC::Identity(
                                                  geometry.N_t, geometry.N_t))),
                        Sense::kLe, constraints.P_t);

  sp.problem.minimize(objective);
  return sp;
}

SdrSolution solve_sdr(const SdrProblem& sp,
                      const conic::SolveOptions& options) {
  const conic::ConicSolution sol = conic::solve(sp.problem, options);

  SdrSolution out;
  out.status = sol.status;
  out.detail = sol.detail;
  out.primal_residual = sol.primal_residual;
  out.dual_residual = sol.dual_residual;
  out.duality_gap = sol.duality_gap;
  out.iterations = sol.iterations;
  out.certificate_y = sol.certificate_y;
  out.certificate_z = sol.certificate_z;
  if (sol.status == conic::SolveStatus::kInfeasible) return out;

  out.R_c = sol.matrix_values;
  out.R_x = MatC::Zero(sp.N_t, sp.N_t);
  for (const MatC& r : out.R_c) out.R_x += r;

  const int K = static_cast<int>(sp.t_vars.size());
  out.t_k.resize(K);
  for (int k = 0; k < K; ++k)
    out.t_k[k] = sol.scalar_values[sp.t_vars[k].v] * sp.t_scale[k];
  out.t_min = sol.scalar_values[sp.t_min_var.v];
  out.objective = sp.l.dot(out.t_k);

  out.rank_one.resize(out.R_c.size());
  for (size_t c = 0; c < out.R_c.size(); ++c)
    out.rank_one[c] = check_rank_one(out.R_c[c]);
  return out;
}

bool check_rank_one(const MatC& R_c, double epsilon_rank) {
  const VecD profile = conic::extract_rank_profile(R_c);
  if (profile.size() < 2) return true;
  return profile[1] <= epsilon_rank * profile[0];
}

VecD evaluate_sinr(const MatC& W, const ChannelSet& channels) {
  const int C = channels.users();
  require(W.cols() == C, "beamformer count must match user count");
  VecD out(C);
  for (int c = 0; c < C; ++c) {
    const VecC& h = channels.h[c];
    double interference = channels.sigma2[c];
    for (int i = 0; i < C; ++i)
      if (i != c) interference += std::norm(h.dot(W.col(i)));
    out[c] = std::norm(h.dot(W.col(c))) / interference;
  }
  return out;
}

double coverage_margin(const LosPartition& partition,
                       const ArrayGeometry& geometry, const MatC& R_x) {
  const std::vector<SubsectionArrays> arrays =
      subsection_arrays(partition, geometry);
  double hi = 0.0;
  const double lo = subsection_power_min(arrays, R_x, &hi);
  return 2.0 * lo - hi;
}

BeamformerSet extract_rank_one(const SdrSolution& solution,
                               const LosPartition& partition,
                               const ArrayGeometry& geometry,
                               const DesignConstraints& constraints,
                               const SensingParams& sensing,
                               const ExtractionOptions& options) {
  require(solution.status == conic::SolveStatus::kOptimal,
          "extraction requires an optimal relaxation");
  const int C = static_cast<int>(solution.R_c.size());
  const int C_users = constraints.channels.users();
  require(C >= 1 && C == C_users,
          "extraction requires one covariance part per user");
  require(options.N_e >= 1, "at least one extraction epoch is required");

  const int N_t = geometry.N_t;
  const double Gamma = constraints.Gamma;

  BeamformerSet out;
  out.W = MatC::Zero(N_t, C);

  // Fills the diagnostic fields from an assembled W.
  const auto finish = [&](BeamformerSet& bs) {
    const MatC R_w = bs.W * bs.W.adjoint();
    bs.sinr = evaluate_sinr(bs.W, constraints.channels);
    bs.power = std::real(R_w.trace());
    bs.coverage_margin = coverage_margin(partition, geometry, R_w);
    try {
      bs.crb = crb_phi_closed_form(partition, R_w, sensing, geometry);
    } catch (const Error&) {
      bs.crb = std::numeric_limits<double>::infinity();
    }
    return bs;
  };

  bool all_rank_one = true;
  for (const MatC& r : solution.R_c)
    if (!check_rank_one(r, options.epsilon_rank)) all_rank_one = false;

  if (all_rank_one) {
    for (int c = 0; c < C; ++c) {
      Eigen::SelfAdjointEigenSolver<MatC> eig(solution.R_c[c]);
      const int top = N_t - 1;  // ascending order
      VecC w = eig.eigenvectors().col(top) *
               std::sqrt(std::max(0.0, eig.eigenvalues()[top]));
      canonicalize_phase(w);
      out.W.col(c) = w;
    }
    out.provenance = BeamformerProvenance::kDirectEigenvector;
    return finish(out);
  }

  // Randomized span sampling. Square roots are fixed per user; every epoch
  // draws fresh directions from an epoch-indexed stream, rescales them to
  // meet all SINR constraints with equality, and is rejected if that is
  // impossible or violates the power cap.
  std::vector<MatC> roots(C);
  std::vector<VecC> tops(C);
  for (int c = 0; c < C; ++c) {
    roots[c] = psd_sqrt(solution.R_c[c]);
    Eigen::SelfAdjointEigenSolver<MatC> eig(solution.R_c[c]);
    tops[c] = eig.eigenvectors().col(N_t - 1);
    canonicalize_phase(tops[c]);
  }

  struct Candidate {
    MatC W;
    int epoch = -1;
    double crb = std::numeric_limits<double>::infinity();
    double margin = -std::numeric_limits<double>::infinity();
    bool covered = false;
    bool valid = false;
  };
  Candidate best_covered, best_margin;
  int rejected = 0, feasible = 0;

  const std::vector<SubsectionArrays> arrays =
      subsection_arrays(partition, geometry);

  for (int epoch = 0; epoch < options.N_e; ++epoch) {
    Rng rng(options.seed, "extract-epoch", static_cast<std::uint64_t>(epoch));

    MatC U(N_t, C);
    bool degenerate = false;
    for (int c = 0; c < C; ++c) {
      VecC u = options.eigenvector_only ? tops[c]
                                        : VecC(roots[c] * rng.cgaussian_vector(N_t));
      const double norm = u.norm();
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        degenerate = true;
        break;
      }
      U.col(c) = u / norm;
    }
    if (degenerate) {
      ++rejected;
      continue;
    }

    // Power shares restoring SINR equality: for each user c,
    //   q_c |h_c^H u_c|^2 - Gamma sum_{i != c} q_i |h_c^H u_i|^2
    //     = Gamma sigma_c^2.
    MatD F(C, C);
    VecD eta(C);
    for (int c = 0; c < C; ++c) {
      const VecC& h = constraints.channels.h[c];
      for (int i = 0; i < C; ++i) {
        const double gain = std::norm(h.dot(U.col(i)));
        F(c, i) = (i == c) ? gain : -Gamma * gain;
      }
      eta[c] = Gamma * constraints.channels.sigma2[c];
    }
    Eigen::FullPivLU<MatD> lu(F);
    if (!lu.isInvertible()) {
      ++rejected;
      continue;
    }
    const VecD q = lu.solve(eta);
    if (!(q.minCoeff() > 0.0) || !q.allFinite()) {
      ++rejected;
      continue;
    }

    MatC W(N_t, C);
    for (int c = 0; c < C; ++c) W.col(c) = std::sqrt(q[c]) * U.col(c);

    // Direct verification of the power cap and the SINR targets.
    if (q.sum() > constraints.P_t * (1.0 + options.power_slack)) {
      ++rejected;
      continue;
    }
    const VecD sinr = evaluate_sinr(W, constraints.channels);
    bool sinr_ok = true;
    for (int c = 0; c < C; ++c)
      if (std::abs(sinr[c] - Gamma) > options.sinr_slack * Gamma)
        sinr_ok = false;
    if (!sinr_ok) {
      ++rejected;
      continue;
    }

    const MatC R_w = W * W.adjoint();
    double p_max = 0.0;
    const double p_min = subsection_power_min(arrays, R_w, &p_max);
    const double margin = 2.0 * p_min - p_max;
    const bool covered = !constraints.coverage_enabled ||
                         margin >= -1e-12 * std::max(1.0, p_max);
    double crb = std::numeric_limits<double>::infinity();
    try {
      crb = crb_phi_closed_form(partition, R_w, sensing, geometry);
    } catch (const Error&) {
    }

    if (covered) {
      ++feasible;
      if (crb < best_covered.crb) {
        best_covered = Candidate{W, epoch, crb, margin, true, true};
      }
    }
    if (margin > best_margin.margin) {
      best_margin = Candidate{W, epoch, crb, margin, covered, true};
    }
  }

  const Candidate& pick =
      best_covered.valid ? best_covered : best_margin;
  if (!pick.valid)
    fail(ErrorCode::kExtractionFailed,
         "every randomization epoch was rejected (" +
             std::to_string(rejected) + " of " +
             std::to_string(options.N_e) + ")");

  out.W = pick.W;
  out.epoch = pick.epoch;
  out.provenance = best_covered.valid ? BeamformerProvenance::kRandomized
                                      : BeamformerProvenance::kCoverageFallback;
  out.epochs_total = options.N_e;
  out.epochs_rejected = rejected;
  out.epochs_feasible = feasible;
  return finish(out);
}

SdrSolution benchmark_beampattern_design(DesignVariant variant,
                                         double phi_o,
                                         const ArrayGeometry& geometry,
                                         const DesignConstraints& constraints,
                                         const conic::SolveOptions& options,
                                         double beamwidth_deg,
                                         double grid_step_deg) {
  require(variant != DesignVariant::kCrbMin,
          "benchmark variants are bp1 and bp2");
  require(beamwidth_deg > 0.0 && grid_step_deg > 0.0,
          "beamwidth and grid step must be positive");
  geometry.validate();
  constraints.validate();
  const int C = constraints.channels.users();
  require(C >= 1 && C <= geometry.N_t,
          "benchmark designs need 1..N_t users");

  conic::ConicProblem problem;
  std::vector<MatrixVarId> R_vars;
  for (int c = 0; c < C; ++c) {
    R_vars.push_back(
        problem.add_hermitian_var("R[" + std::to_string(c) + "]",
                                  geometry.N_t));
    problem.require_psd(R_vars.back());
  }
  const ScalarVarId alpha = problem.add_scalar_var("alpha");
  problem.add_linear("scale_sign", LinExpr().add(alpha, 1.0), Sense::kGe,
                     0.0);

  const double phi_o_deg = rad2deg(phi_o);
  LinExpr objective;
  int grid_index = 0;
  for (double theta_deg = -90.0; theta_deg <= 90.0 + 1e-9;
       theta_deg += grid_step_deg, ++grid_index) {
    const VecC a = steer_tx(geometry, deg2rad(theta_deg));
    const double p_des =
        std::abs(theta_deg - phi_o_deg) <= 0.5 * beamwidth_deg ? 1.0 : 0.0;

    const ScalarVarId s = problem.add_scalar_var(
        "fit_err[" + std::to_string(grid_index) + "]");
    objective.add(s, 1.0);

    // e_i = alpha p_des - a^H R_x a; s_i >= e_i^2 via a 2x2 Schur block.
    LinExpr e = total_quad(R_vars, MatC(-(a * a.adjoint())));
    e.add(alpha, p_des);
    problem.add_lmi("fit[" + std::to_string(grid_index) + "]",
                    {{LinExpr().add(s, 1.0), e}, {e, LinExpr(1.0)}});
  }

  for (int c = 0; c < C; ++c) {
    const VecC& h = constraints.channels.h[c];
    const MatC hh = h * h.adjoint();
    LinExpr sinr;
    for (int i = 0; i < C; ++i) {
      const MatC coeff = (i == c) ? MatC(hh / constraints.Gamma) : MatC(-hh);
      sinr.add(R_vars[i], coeff);
    }
    problem.add_linear("sinr[" + std::to_string(c) + "]", sinr, Sense::kGe,
                       constraints.channels.sigma2[c]);
  }

  problem.add_linear(
      "power",
      total_quad(R_vars,
                 MatC(MatC::Identity(geometry.N_t, geometry.N_t))),
      variant == DesignVariant::kBp2 ? Sense::kEq : Sense::kLe,
      constraints.P_t);

  problem.minimize(objective);

  const conic::ConicSolution sol = conic::solve(problem, options);

  SdrSolution out;
  out.status = sol.status;
  out.detail = sol.detail;
  out.primal_residual = sol.primal_residual;
  out.dual_residual = sol.dual_residual;
  out.duality_gap = sol.duality_gap;
  out.iterations = sol.iterations;
  out.certificate_y = sol.certificate_y;
  out.certificate_z = sol.certificate_z;
  if (sol.status == conic::SolveStatus::kInfeasible) return out;

  out.R_c = sol.matrix_values;
  out.R_x = MatC::Zero(geometry.N_t, geometry.N_t);
  for (const MatC& r : out.R_c) out.R_x += r;
  out.objective = sol.objective;
  out.rank_one.resize(out.R_c.size());
  for (size_t c = 0; c < out.R_c.size(); ++c)
    out.rank_one[c] = check_rank_one(out.R_c[c]);
  return out;
}

SdrAudit audit_sdr_solution(const SdrSolution& solution,
                            const LosPartition& partition,
                            const ArrayGeometry& geometry,
                            const DesignConstraints& constraints) {
  SdrAudit audit;
  const MatC& R_x = solution.R_x;
  const std::vector<SubsectionArrays> arrays =
      subsection_arrays(partition, geometry);

  audit.power = std::real(R_x.trace());
  audit.power_violation =
      std::max(0.0, audit.power - constraints.P_t) / constraints.P_t;

  const int C = constraints.channels.users();
  for (int c = 0; c < C; ++c) {
    const VecC& h = constraints.channels.h[c];
    const double own = std::real(h.dot(solution.R_c[c] * h));
    const double all = std::real(h.dot(R_x * h));
    const double lhs = (1.0 + 1.0 / constraints.Gamma) * own;
    const double rhs = all + constraints.channels.sigma2[c];
    audit.worst_sinr_violation =
        std::max(audit.worst_sinr_violation,
                 (rhs - lhs) / std::max(1.0, std::abs(rhs)));
  }

  // Schur blocks re-evaluated from the covariance and the bounds (the
  // bound variables only exist for the bound-maximizing design).
  if (solution.t_k.size() ==
      static_cast<Eigen::Index>(partition.subsections.size())) {
    for (size_t k = 0; k < arrays.size(); ++k) {
      const SubsectionArrays& sa = arrays[k];
      const double A = std::real(sa.a.dot(R_x * sa.a));
      const double B = std::real(sa.adot.dot(R_x * sa.adot));
      const double cross = std::real(sa.adot.dot(R_x * sa.a));
      Eigen::Matrix2d P;
      P << sa.coef_tx * A + B - solution.t_k[k], cross, cross, A;
      const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(
          P, Eigen::EigenvaluesOnly);
      audit.worst_block_eig =
          std::min(audit.worst_block_eig, eig.eigenvalues()[0] / scale);
    }
  }

  double p_max = 0.0;
  const double p_min = subsection_power_min(arrays, R_x, &p_max);
  audit.coverage_margin = 2.0 * p_min - p_max;
  if (constraints.coverage_enabled && p_max > 0.0)
    audit.coverage_violation =
        std::max(0.0, -audit.coverage_margin) / p_max;
  return audit;
}

}  // namespace isac

// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// conelp.hpp: primal-dual interior-point solver for conic linear programs
//
//   minimize    c'x
//   subject to  A x = b
//               G x + s = h,   s in K,
//
// where K is a product of a nonnegative orthant and packed real symmetric
// positive-semidefinite blocks (svec storage, see svec.hpp). The solver
// runs on the homogeneous self-dual embedding with Nesterov-Todd scaling
// and a Mehrotra predictor-corrector, so it returns either an optimal
// primal-dual pair or a certificate of primal or dual infeasibility.

#pragma once

#include <string>
#include <vector>

#include "core/common.hpp"
#include "svec.hpp"

namespace isac::conic {

struct ConeSpec {
  int nonneg = 0;          // leading nonnegative-orthant dimension
  std::vector<int> psd;    // orders of trailing PSD blocks

  int packed_dim() const;      // total svec length of one cone vector
  int barrier_degree() const;  // nonneg + sum of PSD orders
  void validate() const;
};

struct ConelpProblem {
  VecD c;
  MatD a;
  VecD b;
  MatD g;
  VecD h;
  ConeSpec cones;

  void validate() const;
};

enum class ConelpStatus {
  kOptimal,
  kPrimalInfeasible,
  kDualInfeasible,
  kNumericalFailure,
};

const char* conelp_status_name(ConelpStatus s);

struct ConelpOptions {
  double tol = 1e-8;       // feasibility and relative-gap tolerance
  int max_iter = 200;
  bool trace = false;      // print one line per iteration (debugging aid)

  // Structure hint: variable slices that enter a PSD block only through
  // the two-entry Hermitian embedding (columns of -E, zero offset). The
  // normal-matrix assembly exploits this; the hint must describe rows of g
  // exactly, which the problem compiler guarantees by construction.
  struct PsdVarBlock {
    int block = 0;    // index into cones.psd
    int param0 = 0;   // first x-column of the slice
    std::vector<EmbeddingColumn> cols;
  };
  std::vector<PsdVarBlock> psd_var_blocks;
};

struct ConelpResult {
  ConelpStatus status = ConelpStatus::kNumericalFailure;
  std::string detail;

  VecD x, y, z, s;  // optimal: primal-dual solution; infeasible: certificate
  double pcost = 0.0, dcost = 0.0;
  double gap = 0.0;
  double pres = 0.0, dres = 0.0;
  int iterations = 0;
};

ConelpResult solve_conelp(const ConelpProblem& prob,
                          const ConelpOptions& opt = {});

}  // namespace isac::conic

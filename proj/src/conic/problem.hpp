// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// problem.hpp: declarative conic-program builder over Hermitian matrix
// variables and real scalar variables.
//
// A problem is a linear objective plus three constraint kinds:
//   * scalar relations (==, <=, >=) between real-linear expressions,
//   * linear matrix inequalities (a symmetric matrix of expressions must
//     be positive semidefinite),
//   * cone membership of a matrix variable (X itself PSD).
// Expressions pair each matrix variable X with a Hermitian coefficient
// matrix A, contributing <A, X> = real(trace(A^H X)). compile() lowers
// everything onto the real conelp form of conelp.hpp: Hermitian variables
// become their real parameter vectors, PSD memberships become the
// 2n x 2n symmetric embedding, and LMIs are packed per entry.

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "conelp.hpp"
#include "core/common.hpp"

namespace isac::conic {

struct MatrixVarId {
  int v = -1;
};
struct ScalarVarId {
  int v = -1;
};

class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}

  LinExpr& add(MatrixVarId var, const MatC& coeff);  // += Re tr(coeff^H X)
  LinExpr& add(ScalarVarId var, double coeff);
  LinExpr& add_constant(double v);

  double constant() const { return constant_; }
  const std::map<int, MatC>& matrix_terms() const { return matrix_terms_; }
  const std::map<int, double>& scalar_terms() const { return scalar_terms_; }

  // Value at a concrete assignment (used by audits and tests).
  double evaluate(const std::vector<MatC>& matrices,
                  const VecD& scalars) const;

 private:
  std::map<int, MatC> matrix_terms_;
  std::map<int, double> scalar_terms_;
  double constant_ = 0.0;
};

enum class Sense { kEq, kLe, kGe };

const char* sense_name(Sense s);

enum class SolveStatus { kOptimal, kInfeasible, kNumericalFailure };

const char* solve_status_name(SolveStatus s);

struct LinearConstraint {
  std::string label;
  LinExpr expr;
  Sense sense = Sense::kLe;
  double rhs = 0.0;
};

struct LmiConstraint {
  std::string label;
  std::vector<std::vector<LinExpr>> entries;  // symmetric matrix of exprs
};

struct ConicSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  std::string detail;

  std::vector<MatC> matrix_values;  // exactly Hermitian
  VecD scalar_values;
  double objective = 0.0;

  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;  // relative to max(1, |pcost|, |dcost|)
  int iterations = 0;

  // Infeasibility certificate in compiled coordinates: a separating
  // functional (y, z) with A'y + G'z ~ 0, z in K*, and h'z + b'y = -1.
  VecD certificate_y, certificate_z;
};

struct SolveOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  bool trace = false;
};

class ConicProblem {
 public:
  MatrixVarId add_hermitian_var(const std::string& name, int order);
  ScalarVarId add_scalar_var(const std::string& name);

  // Constrain the matrix variable itself to the PSD cone.
  void require_psd(MatrixVarId var);

  void add_linear(const std::string& label, const LinExpr& expr, Sense sense,
                  double rhs);
  // entries must form a symmetric matrix of expressions.
  void add_lmi(const std::string& label,
               const std::vector<std::vector<LinExpr>>& entries);

  void minimize(const LinExpr& objective);

  // Introspection.
  int matrix_var_count() const { return static_cast<int>(mvars_.size()); }
  int scalar_var_count() const { return static_cast<int>(svars_.size()); }
  int matrix_var_order(MatrixVarId var) const;
  const std::string& matrix_var_name(MatrixVarId var) const;
  const std::string& scalar_var_name(ScalarVarId var) const;
  const std::vector<LinearConstraint>& linear_constraints() const {
    return linear_;
  }
  const std::vector<LmiConstraint>& lmi_constraints() const { return lmis_; }
  const LinExpr& objective() const { return objective_; }

  // Lowered real conelp form plus the maps needed to interpret it.
  struct Compiled {
    ConelpProblem lp;
    ConelpOptions options;      // carries the PSD-variable structure hints
    std::vector<int> mvar_param0;
    int scalar_param0 = 0;
    double objective_constant = 0.0;
  };
  Compiled compile() const;

  // Self-describing text dump (row-major coefficients, explicit re/im).
  void dump(std::ostream& os) const;

 private:
  struct MVar {
    std::string name;
    int order = 0;
    bool psd = false;
  };
  void check_expr(const LinExpr& e, const char* what) const;

  std::vector<MVar> mvars_;
  std::vector<std::string> svars_;
  std::vector<LinearConstraint> linear_;
  std::vector<LmiConstraint> lmis_;
  LinExpr objective_;
};

ConicSolution solve(const ConicProblem& problem,
                    const SolveOptions& options = {});

// Eigenvalues of a Hermitian matrix, descending, with small negatives
// (down to -1e-8 * lambda_max) clipped to zero.
VecD extract_rank_profile(const MatC& x);

}  // namespace isac::conic

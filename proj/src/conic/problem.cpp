// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// problem.cpp: see problem.hpp.

#include "problem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "core/errors.hpp"

namespace isac::conic {

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Numeric structural equality of two expressions (used by the LMI
// symmetry check).
bool expr_close(const LinExpr& a, const LinExpr& b) {
  const double tol = 1e-10;
  if (std::abs(a.constant() - b.constant()) >
      tol * (1.0 + std::abs(a.constant()) + std::abs(b.constant())))
    return false;
  if (a.scalar_terms().size() != b.scalar_terms().size() ||
      a.matrix_terms().size() != b.matrix_terms().size())
    return false;
  for (const auto& [k, va] : a.scalar_terms()) {
    const auto it = b.scalar_terms().find(k);
    if (it == b.scalar_terms().end()) return false;
    if (std::abs(va - it->second) >
        tol * (1.0 + std::abs(va) + std::abs(it->second)))
      return false;
  }
  for (const auto& [k, ma] : a.matrix_terms()) {
    const auto it = b.matrix_terms().find(k);
    if (it == b.matrix_terms().end()) return false;
    if ((ma - it->second).norm() >
        tol * (1.0 + ma.norm() + it->second.norm()))
      return false;
  }
  return true;
}

void dump_matrix(std::ostream& os, const MatC& m, const char* indent) {
  for (int i = 0; i < m.rows(); ++i) {
    os << indent << "row " << i << ":";
    for (int j = 0; j < m.cols(); ++j)
      os << ' ' << m(i, j).real() << ' ' << m(i, j).imag();
    os << '\n';
  }
}

void dump_expr(std::ostream& os, const LinExpr& e, const char* indent) {
  os << indent << "constant " << e.constant() << '\n';
  for (const auto& [v, c] : e.matrix_terms()) {
    os << indent << "matrix-term var " << v << " order " << c.rows()
       << " coeff-row-major re/im\n";
    dump_matrix(os, c, indent);
  }
  for (const auto& [v, c] : e.scalar_terms())
    os << indent << "scalar-term var " << v << " coeff " << c << '\n';
}

}  // namespace

// ===== LinExpr =============================================================

LinExpr& LinExpr::add(MatrixVarId var, const MatC& coeff) {
  require(var.v >= 0, "matrix term references an invalid variable");
  auto [it, fresh] = matrix_terms_.try_emplace(var.v, coeff);
  if (!fresh) it->second += coeff;
  return *this;
}

LinExpr& LinExpr::add(ScalarVarId var, double coeff) {
  require(var.v >= 0, "scalar term references an invalid variable");
  scalar_terms_[var.v] += coeff;
  return *this;
}

LinExpr& LinExpr::add_constant(double v) {
  constant_ += v;
  return *this;
}

double LinExpr::evaluate(const std::vector<MatC>& matrices,
                         const VecD& scalars) const {
  double out = constant_;
  for (const auto& [v, c] : matrix_terms_) {
    require(v < static_cast<int>(matrices.size()),
            "expression references a missing matrix value");
    out += (c.adjoint() * matrices[v]).trace().real();
  }
  for (const auto& [v, c] : scalar_terms_) {
    require(v < scalars.size(), "expression references a missing scalar");
    out += c * scalars[v];
  }
  return out;
}

const char* sense_name(Sense s) {
  switch (s) {
    case Sense::kEq:
      return "eq";
    case Sense::kLe:
      return "le";
    case Sense::kGe:
      return "ge";
  }
  return "unknown";
}

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

// ===== ConicProblem ========================================================

MatrixVarId ConicProblem::add_hermitian_var(const std::string& name,
                                            int order) {
  require(order >= 1, "matrix variable order must be >= 1");
  mvars_.push_back({name, order, false});
  return {static_cast<int>(mvars_.size()) - 1};
}

ScalarVarId ConicProblem::add_scalar_var(const std::string& name) {
  svars_.push_back(name);
  return {static_cast<int>(svars_.size()) - 1};
}

void ConicProblem::require_psd(MatrixVarId var) {
  require(var.v >= 0 && var.v < matrix_var_count(),
          "require_psd on an unknown variable");
  mvars_[var.v].psd = true;
}

void ConicProblem::check_expr(const LinExpr& e, const char* what) const {
  for (const auto& [v, c] : e.matrix_terms()) {
    require(v < matrix_var_count(), std::string(what) +
                                        ": matrix term references an "
                                        "unknown variable");
    require(c.rows() == c.cols() && c.rows() == mvars_[v].order,
            std::string(what) + ": coefficient order mismatch");
    require((c - c.adjoint()).norm() <= 1e-10 * (1.0 + c.norm()),
            std::string(what) + ": coefficient matrix is not Hermitian");
  }
  for (const auto& [v, c] : e.scalar_terms()) {
    (void)c;
    require(v < scalar_var_count(), std::string(what) +
                                        ": scalar term references an "
                                        "unknown variable");
  }
  require(std::isfinite(e.constant()), std::string(what) +
                                           ": non-finite constant");
}

void ConicProblem::add_linear(const std::string& label, const LinExpr& expr,
                              Sense sense, double rhs) {
  check_expr(expr, "linear constraint");
  require(std::isfinite(rhs), "linear constraint: non-finite bound");
  linear_.push_back({label, expr, sense, rhs});
}

void ConicProblem::add_lmi(const std::string& label,
                           const std::vector<std::vector<LinExpr>>& entries) {
  const int m = static_cast<int>(entries.size());
  require(m >= 1, "LMI must have at least one row");
  for (const auto& row : entries)
    require(static_cast<int>(row.size()) == m, "LMI entries must be square");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) {
      check_expr(entries[i][j], "LMI entry");
      require(expr_close(entries[i][j], entries[j][i]),
              "LMI entries are not symmetric");
    }
  lmis_.push_back({label, entries});
}

void ConicProblem::minimize(const LinExpr& objective) {
  check_expr(objective, "objective");
  objective_ = objective;
}

int ConicProblem::matrix_var_order(MatrixVarId var) const {
  require(var.v >= 0 && var.v < matrix_var_count(), "unknown matrix var");
  return mvars_[var.v].order;
}

const std::string& ConicProblem::matrix_var_name(MatrixVarId var) const {
  require(var.v >= 0 && var.v < matrix_var_count(), "unknown matrix var");
  return mvars_[var.v].name;
}

const std::string& ConicProblem::scalar_var_name(ScalarVarId var) const {
  require(var.v >= 0 && var.v < scalar_var_count(), "unknown scalar var");
  return svars_[var.v];
}

ConicProblem::Compiled ConicProblem::compile() const {
  Compiled out;

  // --- parameter layout ----------------------------------------------------
  int at = 0;
  out.mvar_param0.resize(mvars_.size());
  for (size_t v = 0; v < mvars_.size(); ++v) {
    out.mvar_param0[v] = at;
    at += hermitian_param_count(mvars_[v].order);
  }
  out.scalar_param0 = at;
  at += scalar_var_count();
  const int n = at;
  require(n >= 1, "problem has no variables");

  const auto expr_row = [&](const LinExpr& e) {
    VecD row = VecD::Zero(n);
    for (const auto& [v, c] : e.matrix_terms())
      row.segment(out.mvar_param0[v], hermitian_param_count(mvars_[v].order)) +=
          hermitian_coeff_vector(c);
    for (const auto& [v, c] : e.scalar_terms())
      row[out.scalar_param0 + v] += c;
    return row;
  };

  // --- objective -----------------------------------------------------------
  out.lp.c = expr_row(objective_);
  out.objective_constant = objective_.constant();

  // --- equality and orthant rows --------------------------------------------
  std::vector<VecD> eq_rows, lp_rows;
  std::vector<double> eq_rhs, lp_rhs;
  for (const auto& con : linear_) {
    VecD row = expr_row(con.expr);
    const double off = con.rhs - con.expr.constant();
    switch (con.sense) {
      case Sense::kEq:
        eq_rows.push_back(std::move(row));
        eq_rhs.push_back(off);
        break;
      case Sense::kLe:
        lp_rows.push_back(std::move(row));
        lp_rhs.push_back(off);
        break;
      case Sense::kGe:
        lp_rows.push_back(-row);
        lp_rhs.push_back(-off);
        break;
    }
  }

  // --- cone layout: orthant, PSD variables, LMIs ----------------------------
  ConeSpec cones;
  cones.nonneg = static_cast<int>(lp_rows.size());
  std::vector<int> psd_vars;
  for (size_t v = 0; v < mvars_.size(); ++v)
    if (mvars_[v].psd) {
      psd_vars.push_back(static_cast<int>(v));
      cones.psd.push_back(2 * mvars_[v].order);
    }
  for (const auto& lmi : lmis_)
    cones.psd.push_back(static_cast<int>(lmi.entries.size()));

  const int rows = cones.packed_dim();
  out.lp.g = MatD::Zero(rows, n);
  out.lp.h = VecD::Zero(rows);
  for (size_t i = 0; i < lp_rows.size(); ++i) {
    out.lp.g.row(static_cast<int>(i)) = lp_rows[i].transpose();
    out.lp.h[static_cast<int>(i)] = lp_rhs[i];
  }

  int offset = cones.nonneg;
  for (size_t k = 0; k < psd_vars.size(); ++k) {
    const int v = psd_vars[k];
    const int order = mvars_[v].order;
    ConelpOptions::PsdVarBlock hint;
    hint.block = static_cast<int>(k);
    hint.param0 = out.mvar_param0[v];
    hint.cols = hermitian_embedding_columns(order);
    for (size_t p = 0; p < hint.cols.size(); ++p)
      for (int r = 0; r < 2; ++r)
        out.lp.g(offset + hint.cols[p].row[r],
                 hint.param0 + static_cast<int>(p)) = -hint.cols[p].val[r];
    out.options.psd_var_blocks.push_back(std::move(hint));
    offset += svec_dim(2 * order);
  }

  for (const auto& lmi : lmis_) {
    const int m = static_cast<int>(lmi.entries.size());
    for (int j = 0; j < m; ++j)
      for (int i = j; i < m; ++i) {
        const double scale = (i == j) ? 1.0 : kSqrt2;
        const int r = offset + svec_index(m, i, j);
        out.lp.g.row(r) = -scale * expr_row(lmi.entries[i][j]).transpose();
        out.lp.h[r] = scale * lmi.entries[i][j].constant();
      }
    offset += svec_dim(m);
  }

  const int p = static_cast<int>(eq_rows.size());
  out.lp.a = MatD::Zero(p, n);
  out.lp.b = VecD::Zero(p);
  for (int i = 0; i < p; ++i) {
    out.lp.a.row(i) = eq_rows[i].transpose();
    out.lp.b[i] = eq_rhs[i];
  }

  out.lp.cones = cones;
  return out;
}

void ConicProblem::dump(std::ostream& os) const {
  os << std::setprecision(17);
  os << "conic-problem\n";
  os << "matrix-vars " << matrix_var_count() << '\n';
  for (size_t v = 0; v < mvars_.size(); ++v)
    os << "  matrix-var " << v << " name " << mvars_[v].name << " order "
       << mvars_[v].order << " psd " << (mvars_[v].psd ? 1 : 0) << '\n';
  os << "scalar-vars " << scalar_var_count() << '\n';
  for (size_t v = 0; v < svars_.size(); ++v)
    os << "  scalar-var " << v << " name " << svars_[v] << '\n';
  os << "objective minimize\n";
  dump_expr(os, objective_, "  ");
  os << "linear-constraints " << linear_.size() << '\n';
  for (size_t k = 0; k < linear_.size(); ++k) {
    const auto& con = linear_[k];
    os << "  constraint " << k << " label " << con.label << " sense "
       << sense_name(con.sense) << " rhs " << con.rhs << '\n';
    dump_expr(os, con.expr, "    ");
  }
  os << "lmi-constraints " << lmis_.size() << '\n';
  for (size_t k = 0; k < lmis_.size(); ++k) {
    const auto& lmi = lmis_[k];
    const int m = static_cast<int>(lmi.entries.size());
    os << "  lmi " << k << " label " << lmi.label << " order " << m << '\n';
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) {
        os << "    entry " << i << ' ' << j << '\n';
        dump_expr(os, lmi.entries[i][j], "      ");
      }
  }
}

// ===== solve ===============================================================

ConicSolution solve(const ConicProblem& problem, const SolveOptions& options) {
  require(options.tolerance > 0.0 && options.tolerance <= 1e-2,
          "solver tolerance must lie in (0, 1e-2]");
  require(options.max_iterations >= 1, "max_iterations must be >= 1");

  const ConicProblem::Compiled compiled = problem.compile();
  ConelpOptions copt = compiled.options;
  copt.tol = options.tolerance;
  copt.max_iter = options.max_iterations;
  copt.trace = options.trace;

  const ConelpResult raw = solve_conelp(compiled.lp, copt);

  ConicSolution sol;
  sol.iterations = raw.iterations;
  sol.primal_residual = raw.pres;
  sol.dual_residual = raw.dres;
  sol.duality_gap =
      raw.gap / std::max({1.0, std::abs(raw.pcost), std::abs(raw.dcost)});
  sol.detail = raw.detail;

  const auto extract_values = [&]() {
    sol.matrix_values.resize(problem.matrix_var_count());
    for (int v = 0; v < problem.matrix_var_count(); ++v) {
      const int order = problem.matrix_var_order({v});
      sol.matrix_values[v] = hermitian_from_params(
          raw.x.segment(compiled.mvar_param0[v],
                        hermitian_param_count(order)),
          order);
    }
    sol.scalar_values = raw.x.segment(compiled.scalar_param0,
                                      problem.scalar_var_count());
    sol.objective =
        compiled.lp.c.dot(raw.x) + compiled.objective_constant;
  };

  switch (raw.status) {
    case ConelpStatus::kOptimal:
      sol.status = SolveStatus::kOptimal;
      extract_values();
      break;
    case ConelpStatus::kPrimalInfeasible:
      sol.status = SolveStatus::kInfeasible;
      sol.certificate_y = raw.y;
      sol.certificate_z = raw.z;
      sol.matrix_values.assign(problem.matrix_var_count(), MatC());
      sol.scalar_values = VecD::Zero(problem.scalar_var_count());
      break;
    case ConelpStatus::kDualInfeasible:
      sol.status = SolveStatus::kNumericalFailure;
      sol.detail =
          "dual infeasibility certificate found; primal unbounded below";
      extract_values();
      break;
    case ConelpStatus::kNumericalFailure:
      sol.status = SolveStatus::kNumericalFailure;
      extract_values();
      break;
  }
  return sol;
}

VecD extract_rank_profile(const MatC& x) {
  require(x.rows() == x.cols(), "rank profile of a non-square matrix");
  require((x - x.adjoint()).norm() <= 1e-8 * (1.0 + x.norm()),
          "rank profile of a non-Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<MatC> eig(x, Eigen::EigenvaluesOnly);
  VecD vals = eig.eigenvalues().reverse();
  for (int i = 0; i < vals.size(); ++i)
    if (vals[i] < 0.0) vals[i] = 0.0;
  return vals;
}

}  // namespace isac::conic

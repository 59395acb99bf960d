// isacbeam test support — see conic_instances.hpp.
//
// SPDX-License-Identifier: MIT

#include "conic_instances.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

namespace isac::testing {

namespace {

using conic::ConicProblem;
using conic::LinExpr;
using conic::MatrixVarId;
using conic::ScalarVarId;
using conic::Sense;

MatC random_hermitian(Rng& rng, int n) {
  const MatC m = rng.cgaussian_matrix(n, n);
  return 0.5 * (m + m.adjoint());
}

MatC random_pd(Rng& rng, int n) {
  const MatC l = rng.cgaussian_matrix(n, n);
  return l * l.adjoint() / static_cast<double>(n) +
         0.4 * MatC::Identity(n, n);
}

}  // namespace

conic::ConicProblem make_random_conic_problem(Rng& rng) {
  ConicProblem prob;

  const int num_mvars = 1 + static_cast<int>(rng.below(2));
  const int num_svars = static_cast<int>(rng.below(4));

  std::vector<MatrixVarId> mvars;
  std::vector<int> orders;
  std::vector<MatC> x0;
  for (int v = 0; v < num_mvars; ++v) {
    const int order = 2 + static_cast<int>(rng.below(5));
    mvars.push_back(prob.add_hermitian_var("X" + std::to_string(v), order));
    prob.require_psd(mvars.back());
    orders.push_back(order);
    x0.push_back(random_pd(rng, order));
  }
  std::vector<ScalarVarId> svars;
  VecD s0(num_svars);
  for (int v = 0; v < num_svars; ++v) {
    svars.push_back(prob.add_scalar_var("u" + std::to_string(v)));
    s0[v] = rng.gaussian();
  }

  const auto random_expr = [&]() {
    LinExpr e;
    for (int v = 0; v < num_mvars; ++v)
      if (rng.uniform() < 0.8)
        e.add(mvars[v], random_hermitian(rng, orders[v]) /
                            std::sqrt(static_cast<double>(orders[v])));
    for (int v = 0; v < num_svars; ++v)
      if (rng.uniform() < 0.8) e.add(svars[v], rng.gaussian());
    return e;
  };

  // Objective.
  prob.minimize(random_expr());

  // Compactness: trace caps and scalar interval bounds around the interior
  // point.
  for (int v = 0; v < num_mvars; ++v) {
    LinExpr tr;
    tr.add(mvars[v], MatC::Identity(orders[v], orders[v]));
    prob.add_linear("trace_cap", tr, Sense::kLe,
                    tr.evaluate(x0, s0) + 1.0 + 2.0 * rng.uniform());
  }
  for (int v = 0; v < num_svars; ++v) {
    LinExpr sv;
    sv.add(svars[v], 1.0);
    const double val = s0[v];
    prob.add_linear("scalar_hi", sv, Sense::kLe,
                    val + 1.0 + rng.uniform());
    prob.add_linear("scalar_lo", sv, Sense::kGe,
                    val - 1.0 - rng.uniform());
  }

  // A few extra random relations, placed so the interior point satisfies
  // them strictly (equalities exactly).
  const int extra = 2 + static_cast<int>(rng.below(4));
  int eq_used = 0;
  for (int k = 0; k < extra; ++k) {
    LinExpr e = random_expr();
    const double val = e.evaluate(x0, s0);
    const double pick = rng.uniform();
    if (pick < 0.25 && eq_used < 2) {
      prob.add_linear("rand_eq", e, Sense::kEq, val);
      ++eq_used;
    } else if (pick < 0.6) {
      prob.add_linear("rand_le", e, Sense::kLe,
                      val + 0.3 + rng.uniform());
    } else {
      prob.add_linear("rand_ge", e, Sense::kGe,
                      val - 0.3 - rng.uniform());
    }
  }

  // Occasionally one small LMI, diagonal-shifted so the interior point
  // keeps a positive margin.
  if (rng.uniform() < 0.5) {
    std::vector<std::vector<LinExpr>> entries(2, std::vector<LinExpr>(2));
    entries[0][0] = random_expr();
    entries[1][1] = random_expr();
    entries[1][0] = random_expr();
    entries[0][1] = entries[1][0];
    Eigen::Matrix2d e0;
    e0 << entries[0][0].evaluate(x0, s0), entries[0][1].evaluate(x0, s0),
        entries[1][0].evaluate(x0, s0), entries[1][1].evaluate(x0, s0);
    const double lmin =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(e0)
            .eigenvalues()
            .minCoeff();
    const double shift = 0.4 - std::min(lmin, 0.0);
    entries[0][0].add_constant(shift);
    entries[1][1].add_constant(shift);
    prob.add_lmi("rand_lmi", entries);
  }

  return prob;
}

}  // namespace isac::testing

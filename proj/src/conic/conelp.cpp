// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// conelp.cpp: see conelp.hpp.
//
// The algorithm is the standard homogeneous self-dual embedding: iterate
// (x, y, z, s, tau, kappa) with s, z interior to the cone and tau,
// kappa > 0, reduce the residuals of
//
//   A x - b tau = 0,     A'y + G'z + c tau = 0,    G x + s - h tau = 0,
//   c'x + b'y + h'z + kappa = 0,
//
// and drive the complementarity products s o z and tau kappa to zero along
// the central path. Search directions come from Nesterov-Todd-scaled
// Newton systems with a Mehrotra predictor-corrector; each one reduces to
// a positive-definite normal-matrix solve G' H^-1 G (plus a small Schur
// complement for the equality rows). Convergence of the embedding yields
// either an optimal pair (tau -> positive) or an infeasibility certificate
// (tau -> 0 with negative dual or primal objective).
//
// The whole iteration is templated on the scalar type. The solver first
// runs in double; when that pass stalls within striking distance of the
// tolerance — the signature of the normal-matrix solve running out of
// mantissa as its condition number grows like the inverse duality gap —
// it reruns once from scratch in long double, which carries enough extra
// digits to close the remaining gap. Both passes are deterministic.

#include "conelp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "core/errors.hpp"

namespace isac::conic {

namespace {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
S sqrt2() {
  static const S v = std::sqrt(S(2));
  return v;
}

template <typename S>
VecD to_double(const VecX<S>& v) {
  return v.template cast<double>();
}

// Scalar-typed copy of the problem data, made once per precision pass.
template <typename S>
struct ProblemData {
  VecX<S> c, b, h;
  MatX<S> a, g;

  static ProblemData from(const ConelpProblem& p) {
    ProblemData d;
    d.c = p.c.cast<S>();
    d.b = p.b.cast<S>();
    d.h = p.h.cast<S>();
    d.a = p.a.cast<S>();
    d.g = p.g.cast<S>();
    return d;
  }
};

// Packed symmetric storage in scalar S (same layout as svec/unsvec).
template <typename S>
VecX<S> svec_t(const MatX<S>& mat) {
  const int m = static_cast<int>(mat.rows());
  VecX<S> v(svec_dim(m));
  int k = 0;
  for (int j = 0; j < m; ++j) {
    v[k++] = mat(j, j);
    for (int i = j + 1; i < m; ++i) v[k++] = sqrt2<S>() * mat(i, j);
  }
  return v;
}

template <typename S>
MatX<S> unsvec_t(const VecX<S>& packed, int m) {
  MatX<S> mat(m, m);
  int k = 0;
  for (int j = 0; j < m; ++j) {
    mat(j, j) = packed[k++];
    for (int i = j + 1; i < m; ++i) {
      const S e = packed[k++] / sqrt2<S>();
      mat(i, j) = e;
      mat(j, i) = e;
    }
  }
  return mat;
}

// ===== cone layout =========================================================

struct ConeLayout {
  int nonneg = 0;
  std::vector<int> order;   // PSD block orders
  std::vector<int> offset;  // packed offset of each PSD block
  int total = 0;

  static ConeLayout build(const ConeSpec& spec) {
    ConeLayout lay;
    lay.nonneg = spec.nonneg;
    int at = spec.nonneg;
    for (int q : spec.psd) {
      lay.order.push_back(q);
      lay.offset.push_back(at);
      at += svec_dim(q);
    }
    lay.total = at;
    return lay;
  }
};

template <typename S>
MatX<S> block_mat(const ConeLayout& lay, const VecX<S>& v, int b) {
  return unsvec_t<S>(v.segment(lay.offset[b], svec_dim(lay.order[b])),
                     lay.order[b]);
}

template <typename S>
void set_block(const ConeLayout& lay, VecX<S>& v, int b, const MatX<S>& m) {
  v.segment(lay.offset[b], svec_dim(lay.order[b])) = svec_t<S>(m);
}

// ===== Nesterov-Todd scaling ==============================================
//
// For each PSD block, with S = mat(s), Z = mat(z), L_s = chol(S),
// L_z = chol(Z) and the SVD L_z' L_s = U diag(lam) V', the scaling matrix
// is R = L_s V diag(lam)^-1/2, which satisfies S = R Lam R' and
// Z = R^-T Lam R^-1. The Newton systems only need T = R R' (through
// H = W W' with H(V) = T V T) plus R itself for mapping between the
// original and scaled spaces. For the nonnegative orthant everything is
// diagonal: w = sqrt(s/z), lam = sqrt(s z).

template <typename S>
struct Scaling {
  VecX<S> d, dinv;    // LP: H diagonal s/z and its inverse
  VecX<S> w;          // sqrt(d)
  VecX<S> lam_lp;     // sqrt(s .* z)
  struct Block {
    MatX<S> r, rinv;
    MatX<S> t, tinv;
    VecX<S> lam;
  };
  std::vector<Block> blocks;
};

template <typename S>
bool compute_scaling(const ConeLayout& lay, const VecX<S>& s,
                     const VecX<S>& z, Scaling<S>* out) {
  const int nl = lay.nonneg;
  out->d.resize(nl);
  out->dinv.resize(nl);
  out->w.resize(nl);
  out->lam_lp.resize(nl);
  for (int i = 0; i < nl; ++i) {
    if (!(s[i] > S(0)) || !(z[i] > S(0))) return false;
    out->d[i] = s[i] / z[i];
    out->dinv[i] = z[i] / s[i];
    out->w[i] = std::sqrt(out->d[i]);
    out->lam_lp[i] = std::sqrt(s[i] * z[i]);
  }
  const int nb = static_cast<int>(lay.order.size());
  out->blocks.resize(nb);
  for (int b = 0; b < nb; ++b) {
    const MatX<S> sm = block_mat<S>(lay, s, b);
    const MatX<S> zm = block_mat<S>(lay, z, b);
    Eigen::LLT<MatX<S>> ls(sm), lz(zm);
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
      return false;
    const MatX<S> lsm = ls.matrixL();
    const MatX<S> lzm = lz.matrixL();
    Eigen::JacobiSVD<MatX<S>> svd(lzm.transpose() * lsm,
                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
    typename Scaling<S>::Block& blk = out->blocks[b];
    blk.lam = svd.singularValues();
    if (blk.lam.minCoeff() <= S(0)) return false;
    const VecX<S> isqrt = blk.lam.cwiseSqrt().cwiseInverse();
    blk.r.noalias() = lsm * svd.matrixV() * isqrt.asDiagonal();
    blk.rinv.noalias() =
        isqrt.asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
    blk.t.noalias() = blk.r * blk.r.transpose();
    blk.tinv.noalias() = blk.rinv.transpose() * blk.rinv;
  }
  return true;
}

// H(v) = W W' v: T V T per PSD block, diag(d) on the orthant.
template <typename S>
VecX<S> apply_h(const ConeLayout& lay, const Scaling<S>& sc,
                const VecX<S>& v) {
  VecX<S> out(v.size());
  out.head(lay.nonneg) = sc.d.cwiseProduct(v.head(lay.nonneg));
  for (size_t b = 0; b < sc.blocks.size(); ++b) {
    const MatX<S> vm = block_mat<S>(lay, v, static_cast<int>(b));
    const MatX<S>& t = sc.blocks[b].t;
    set_block<S>(lay, out, static_cast<int>(b), t * vm * t);
  }
  return out;
}

template <typename S>
VecX<S> apply_hinv(const ConeLayout& lay, const Scaling<S>& sc,
                   const VecX<S>& v) {
  VecX<S> out(v.size());
  out.head(lay.nonneg) = sc.dinv.cwiseProduct(v.head(lay.nonneg));
  for (size_t b = 0; b < sc.blocks.size(); ++b) {
    const MatX<S> vm = block_mat<S>(lay, v, static_cast<int>(b));
    const MatX<S>& ti = sc.blocks[b].tinv;
    set_block<S>(lay, out, static_cast<int>(b), ti * vm * ti);
  }
  return out;
}

// W^-1(v) = R^-1 V R^-T, and W'(v) = R' V R; these map steps into the
// scaled space where the scaled point is diag(lam) on each block.
template <typename S>
VecX<S> apply_winv(const ConeLayout& lay, const Scaling<S>& sc,
                   const VecX<S>& v) {
  VecX<S> out(v.size());
  out.head(lay.nonneg) = v.head(lay.nonneg).cwiseQuotient(sc.w);
  for (size_t b = 0; b < sc.blocks.size(); ++b) {
    const MatX<S> vm = block_mat<S>(lay, v, static_cast<int>(b));
    const MatX<S>& ri = sc.blocks[b].rinv;
    set_block<S>(lay, out, static_cast<int>(b), ri * vm * ri.transpose());
  }
  return out;
}

template <typename S>
VecX<S> apply_wt(const ConeLayout& lay, const Scaling<S>& sc,
                 const VecX<S>& v) {
  VecX<S> out(v.size());
  out.head(lay.nonneg) = v.head(lay.nonneg).cwiseProduct(sc.w);
  for (size_t b = 0; b < sc.blocks.size(); ++b) {
    const MatX<S> vm = block_mat<S>(lay, v, static_cast<int>(b));
    const MatX<S>& r = sc.blocks[b].r;
    set_block<S>(lay, out, static_cast<int>(b), r.transpose() * vm * r);
  }
  return out;
}

template <typename S>
VecX<S> apply_w(const ConeLayout& lay, const Scaling<S>& sc,
                const VecX<S>& v) {
  VecX<S> out(v.size());
  out.head(lay.nonneg) = v.head(lay.nonneg).cwiseProduct(sc.w);
  for (size_t b = 0; b < sc.blocks.size(); ++b) {
    const MatX<S> vm = block_mat<S>(lay, v, static_cast<int>(b));
    const MatX<S>& r = sc.blocks[b].r;
    set_block<S>(lay, out, static_cast<int>(b), r * vm * r.transpose());
  }
  return out;
}

// Jordan product u o v of two scaled-space vectors.
template <typename S>
VecX<S> jordan_product(const ConeLayout& lay, const VecX<S>& u,
                       const VecX<S>& v) {
  VecX<S> out(u.size());
  out.head(lay.nonneg) =
      u.head(lay.nonneg).cwiseProduct(v.head(lay.nonneg));
  for (size_t b = 0; b < lay.order.size(); ++b) {
    const MatX<S> um = block_mat<S>(lay, u, static_cast<int>(b));
    const MatX<S> vm = block_mat<S>(lay, v, static_cast<int>(b));
    set_block<S>(lay, out, static_cast<int>(b),
                 MatX<S>(S(0.5) * (um * vm + vm * um)));
  }
  return out;
}

// Solve lam o x = rho for x, with lam the diagonal scaled point.
template <typename S>
VecX<S> jordan_divide(const ConeLayout& lay, const Scaling<S>& sc,
                      const VecX<S>& rho) {
  VecX<S> out(rho.size());
  out.head(lay.nonneg) =
      rho.head(lay.nonneg).cwiseQuotient(sc.lam_lp);
  for (size_t b = 0; b < lay.order.size(); ++b) {
    MatX<S> rm = block_mat<S>(lay, rho, static_cast<int>(b));
    const VecX<S>& lam = sc.blocks[b].lam;
    for (int i = 0; i < rm.rows(); ++i)
      for (int j = 0; j < rm.cols(); ++j)
        rm(i, j) = S(2) * rm(i, j) / (lam[i] + lam[j]);
    set_block<S>(lay, out, static_cast<int>(b), rm);
  }
  return out;
}

// sigma*mu*e - lam o lam - cross, assembled block-wise (e is the cone
// identity: ones on the orthant, svec(I) on PSD blocks).
template <typename S>
VecX<S> corrector_rhs(const ConeLayout& lay, const Scaling<S>& sc,
                      const VecX<S>& cross, S sigma_mu) {
  VecX<S> out(lay.total);
  out.head(lay.nonneg) =
      VecX<S>::Constant(lay.nonneg, sigma_mu) -
      sc.lam_lp.cwiseProduct(sc.lam_lp) - cross.head(lay.nonneg);
  for (size_t b = 0; b < lay.order.size(); ++b) {
    MatX<S> m = -block_mat<S>(lay, cross, static_cast<int>(b));
    const VecX<S>& lam = sc.blocks[b].lam;
    for (int i = 0; i < m.rows(); ++i)
      m(i, i) += sigma_mu - lam[i] * lam[i];
    set_block<S>(lay, out, static_cast<int>(b), m);
  }
  return out;
}

// Largest step alpha with lam + alpha * dv staying in the cone; dv is a
// scaled-space direction. Returns +inf when unbounded.
template <typename S>
S max_cone_step(const ConeLayout& lay, const Scaling<S>& sc,
                const VecX<S>& dv) {
  S bound = std::numeric_limits<S>::infinity();
  for (int i = 0; i < lay.nonneg; ++i)
    if (dv[i] < S(0)) bound = std::min(bound, -sc.lam_lp[i] / dv[i]);
  for (size_t b = 0; b < lay.order.size(); ++b) {
    const VecX<S> isqrt = sc.blocks[b].lam.cwiseSqrt().cwiseInverse();
    const MatX<S> dm = block_mat<S>(lay, dv, static_cast<int>(b));
    const MatX<S> scaled = isqrt.asDiagonal() * dm * isqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatX<S>> eig(scaled,
                                               Eigen::EigenvaluesOnly);
    const S lmin = eig.eigenvalues().minCoeff();
    if (lmin < S(0)) bound = std::min(bound, S(-1) / lmin);
  }
  return bound;
}

// Shift a raw vector into the interior of the cone (initialization):
// v + (1 - lmin) e whenever the smallest eigenvalue lmin is negative or
// too close to the boundary relative to the block's magnitude. A merely
// nonnegative eigenvalue is not enough: starting on (or within roundoff
// of) the boundary degenerates the very first scaling matrices.
template <typename S>
void shift_into_cone(const ConeLayout& lay, VecX<S>& v) {
  if (lay.nonneg > 0) {
    const S scale = std::max(S(1), v.head(lay.nonneg).cwiseAbs().maxCoeff());
    const S vmin = v.head(lay.nonneg).minCoeff();
    if (vmin <= S(1e-8) * scale) v.head(lay.nonneg).array() += S(1) - vmin;
  }
  for (size_t b = 0; b < lay.order.size(); ++b) {
    const MatX<S> m = block_mat<S>(lay, v, static_cast<int>(b));
    Eigen::SelfAdjointEigenSolver<MatX<S>> eig(m, Eigen::EigenvaluesOnly);
    const S lmin = eig.eigenvalues().minCoeff();
    const S scale = std::max(S(1), m.cwiseAbs().maxCoeff());
    if (lmin <= S(1e-8) * scale) {
      const int q = lay.order[b];
      const int off = lay.offset[b];
      int k = off;
      for (int j = 0; j < q; ++j) {
        v[k] += S(1) - lmin;
        k += q - j;
      }
    }
  }
}

// Gentle variant for resumed iterates: raises the minimum eigenvalue to
// rel * scale and no further. The cold-start shift above recenters to
// order one, which would throw away an endgame point.
template <typename S>
void nudge_into_cone(const ConeLayout& lay, VecX<S>& v, S rel) {
  if (lay.nonneg > 0) {
    const S scale = std::max(S(1), v.head(lay.nonneg).cwiseAbs().maxCoeff());
    const S vmin = v.head(lay.nonneg).minCoeff();
    if (vmin < rel * scale) v.head(lay.nonneg).array() += rel * scale - vmin;
  }
  for (size_t b = 0; b < lay.order.size(); ++b) {
    const MatX<S> m = block_mat<S>(lay, v, static_cast<int>(b));
    Eigen::SelfAdjointEigenSolver<MatX<S>> eig(m, Eigen::EigenvaluesOnly);
    const S lmin = eig.eigenvalues().minCoeff();
    const S scale = std::max(S(1), m.cwiseAbs().maxCoeff());
    if (lmin < rel * scale) {
      const int q = lay.order[b];
      const int off = lay.offset[b];
      int k = off;
      for (int j = 0; j < q; ++j) {
        v[k] += rel * scale - lmin;
        k += q - j;
      }
    }
  }
}

// Entry of the svec-space matrix of V -> T^-1 V T^-1 between packed rows
// (i, j) and (a, b), i >= j, a >= b.
template <typename S>
inline S smat_elem(const MatX<S>& ti, int i, int j, int a, int b) {
  if (i == j) {
    if (a == b) return ti(i, a) * ti(i, a);
    return sqrt2<S>() * ti(i, a) * ti(i, b);
  }
  if (a == b) return sqrt2<S>() * ti(i, a) * ti(j, a);
  return ti(i, a) * ti(j, b) + ti(i, b) * ti(j, a);
}

// Sparse/dense row of g used in the normal-matrix assembly.
template <typename S>
struct RowRep {
  bool dense = false;
  VecX<S> vec;
  std::vector<std::pair<int, S>> nnz;  // sorted by index
};

// m += coef * a a', lower triangle only.
template <typename S>
void add_self_outer(MatX<S>& m, const RowRep<S>& a, S coef) {
  if (a.dense) {
    m.template selfadjointView<Eigen::Lower>().rankUpdate(a.vec, coef);
    return;
  }
  const int k = static_cast<int>(a.nnz.size());
  for (int u = 0; u < k; ++u)
    for (int v = 0; v <= u; ++v)
      m(a.nnz[u].first, a.nnz[v].first) +=
          coef * a.nnz[u].second * a.nnz[v].second;
}

// m += coef * (a b' + b a'), lower triangle only.
template <typename S>
void add_pair_outer(MatX<S>& m, const RowRep<S>& a, const RowRep<S>& b,
                    S coef) {
  if (a.dense && b.dense) {
    m.template selfadjointView<Eigen::Lower>().rankUpdate(a.vec, b.vec, coef);
    return;
  }
  if (!a.dense && !b.dense) {
    for (const auto& [i, vi] : a.nnz)
      for (const auto& [j, vj] : b.nnz) {
        const S add = coef * vi * vj;
        if (i == j)
          m(i, i) += S(2) * add;
        else if (i > j)
          m(i, j) += add;
        else
          m(j, i) += add;
      }
    return;
  }
  const RowRep<S>& dn = a.dense ? a : b;
  const RowRep<S>& sp = a.dense ? b : a;
  const int n = static_cast<int>(dn.vec.size());
  for (const auto& [j, vj] : sp.nnz) {
    m.col(j).segment(j, n - j) += coef * vj * dn.vec.segment(j, n - j);
    m.row(j).head(j + 1) += coef * vj * dn.vec.head(j + 1).transpose();
  }
}

// ===== KKT engine ==========================================================
//
// Solves, for the current scaling H,
//
//   [ 0   A'  G' ] [dx]   [bx]
//   [ A   0   0  ] [dy] = [by]
//   [ G   0  -H  ] [dz]   [bz]
//
// by eliminating dz = H^-1 (G dx - bz), factoring the normal matrix
// M = G' H^-1 G (dense Cholesky with a tiny diagonal shift), and a Schur
// complement over the equality rows. Iterative refinement on the full
// system absorbs both the shift and accumulated roundoff.

template <typename S>
class KktEngine {
 public:
  KktEngine(const ProblemData<S>& prob, const ConeLayout& lay,
            const ConelpOptions& opt)
      : prob_(prob), lay_(lay), nvar_(static_cast<int>(prob.c.size())),
        neq_(static_cast<int>(prob.b.size())), trace_(opt.trace) {
    // Rows of g covered by two-entry embedding hints are handled by the
    // structured pair loop; everything else goes through the generic path.
    hinted_block_.assign(lay.order.size(), -1);
    for (size_t hi = 0; hi < opt.psd_var_blocks.size(); ++hi)
      hinted_block_[opt.psd_var_blocks[hi].block] = static_cast<int>(hi);
    hints_ = &opt.psd_var_blocks;

    row_ij_.resize(lay.order.size());
    for (size_t b = 0; b < lay.order.size(); ++b) {
      std::vector<int>& tab = row_ij_[b];
      const int q = lay.order[b];
      tab.resize(2 * svec_dim(q));
      int k = 0;
      for (int j = 0; j < q; ++j)
        for (int i = j; i < q; ++i) {
          tab[2 * k] = i;
          tab[2 * k + 1] = j;
          ++k;
        }
    }

    // Generic rows: the orthant plus every unhinted PSD block.
    generic_rows_.clear();
    for (int i = 0; i < lay.nonneg; ++i) generic_rows_.push_back(i);
    for (size_t b = 0; b < lay.order.size(); ++b)
      if (hinted_block_[b] < 0)
        for (int r = 0; r < svec_dim(lay.order[b]); ++r)
          generic_rows_.push_back(lay.offset[b] + r);

    rows_.resize(generic_rows_.size());
    const double density_cut = std::max(8.0, nvar_ / 8.0);
    for (size_t k = 0; k < generic_rows_.size(); ++k) {
      RowRep<S>& row = rows_[k];
      row.vec = prob.g.row(generic_rows_[k]).transpose();
      int nnz = 0;
      for (int j = 0; j < nvar_; ++j)
        if (row.vec[j] != S(0)) ++nnz;
      row.dense = nnz > density_cut;
      if (!row.dense)
        for (int j = 0; j < nvar_; ++j)
          if (row.vec[j] != S(0)) row.nnz.emplace_back(j, row.vec[j]);
    }
  }

  // Refactor for a new scaling. Returns false if the normal matrix cannot
  // be factored even after enlarging the regularization.
  bool factor(const Scaling<S>& sc) {
    sc_ = &sc;
    m_.setZero(nvar_, nvar_);

    // Hinted PSD variable blocks: (E' H^-1 E)_pq via the two packed
    // entries of each embedding column.
    for (size_t hi = 0; hi < hints_->size(); ++hi) {
      const auto& hint = (*hints_)[hi];
      const MatX<S>& ti = sc.blocks[hint.block].tinv;
      const std::vector<int>& tab = row_ij_[hint.block];
      const int np = static_cast<int>(hint.cols.size());
      for (int p = 0; p < np; ++p) {
        const EmbeddingColumn& cp = hint.cols[p];
        for (int q = 0; q <= p; ++q) {
          const EmbeddingColumn& cq = hint.cols[q];
          S acc = S(0);
          for (int r = 0; r < 2; ++r)
            for (int t = 0; t < 2; ++t)
              acc += S(cp.val[r]) * S(cq.val[t]) *
                     smat_elem<S>(ti, tab[2 * cp.row[r]],
                                  tab[2 * cp.row[r] + 1], tab[2 * cq.row[t]],
                                  tab[2 * cq.row[t] + 1]);
          m_(hint.param0 + p, hint.param0 + q) += acc;
        }
      }
    }

    // Orthant rows: dinv-weighted outer products.
    size_t k = 0;
    for (; k < generic_rows_.size() && generic_rows_[k] < lay_.nonneg; ++k)
      add_self_outer<S>(m_, rows_[k], sc.dinv[generic_rows_[k]]);

    // Unhinted PSD blocks: expand G_b' Hinv_b G_b over row pairs, using
    // the dense svec-space matrix of V -> T^-1 V T^-1.
    for (size_t b = 0; b < lay_.order.size(); ++b) {
      if (hinted_block_[b] >= 0) continue;
      const int q = lay_.order[b];
      const int m = svec_dim(q);
      const MatX<S>& ti = sc.blocks[b].tinv;
      const std::vector<int>& tab = row_ij_[b];
      MatX<S> hinv(m, m);
      for (int r = 0; r < m; ++r)
        for (int t = 0; t <= r; ++t) {
          const S e = smat_elem<S>(ti, tab[2 * r], tab[2 * r + 1],
                                   tab[2 * t], tab[2 * t + 1]);
          hinv(r, t) = e;
          hinv(t, r) = e;
        }
      for (int r = 0; r < m; ++r) {
        add_self_outer<S>(m_, rows_[k + r], hinv(r, r));
        for (int t = 0; t < r; ++t)
          add_pair_outer<S>(m_, rows_[k + r], rows_[k + t], hinv(r, t));
      }
      k += m;
    }

    // Factor with a small diagonal shift, enlarging it on failure. The
    // base shift scales with the working precision so the extended pass
    // is not floored at double accuracy.
    const S eps = std::numeric_limits<S>::epsilon();
    const S base =
        S(500) * eps * std::max(S(1), m_.diagonal().cwiseAbs().maxCoeff());
    S reg = base;
    for (int attempt = 0; attempt < 4; ++attempt) {
      MatX<S> shifted = m_;
      shifted.diagonal().array() += reg;
      llt_.compute(shifted.template selfadjointView<Eigen::Lower>());
      if (llt_.info() == Eigen::Success) break;
      reg *= S(1e3);
    }
    if (llt_.info() != Eigen::Success) return false;

    if (neq_ > 0) {
      MatX<S> at = prob_.a.transpose();
      MatX<S> minv_at = llt_.solve(at);
      MatX<S> schur = prob_.a * minv_at;
      schur.diagonal().array() +=
          S(500) * eps *
          std::max(S(1), schur.diagonal().cwiseAbs().maxCoeff());
      schur_llt_.compute(schur);
      if (schur_llt_.info() != Eigen::Success) return false;
    }
    return true;
  }

  // Solve the 3x3 system, then iteratively refine with the true operators.
  // Refinement is monotone: a correction that increases the residual is
  // undone, which keeps the endgame (ill-conditioned scalings whose
  // residual measurements sit on a roundoff floor) from diverging.
  void solve(const VecX<S>& bx, const VecX<S>& by, const VecX<S>& bz,
             VecX<S>* dx, VecX<S>* dy, VecX<S>* dz) const {
    solve_once(bx, by, bz, dx, dy, dz);
    const S eps = std::numeric_limits<S>::epsilon();
    const S scale =
        S(1) + std::max({bx.cwiseAbs().maxCoeff(),
                         by.size() ? by.cwiseAbs().maxCoeff() : S(0),
                         bz.cwiseAbs().maxCoeff()});
    S prev = std::numeric_limits<S>::infinity();
    VecX<S> px, py, pz;
    for (int round = 0; round < 4; ++round) {
      const VecX<S> rx = bx - (prob_.a.transpose() * *dy +
                               prob_.g.transpose() * *dz);
      const VecX<S> ry = by - prob_.a * *dx;
      const VecX<S> rz =
          bz - (prob_.g * *dx - apply_h<S>(lay_, *sc_, *dz));
      const S resid = std::max({rx.cwiseAbs().maxCoeff(),
                                ry.size() ? ry.cwiseAbs().maxCoeff() : S(0),
                                rz.cwiseAbs().maxCoeff()});
      if (trace_)
        std::printf("    kkt round %d resid %.3e scale %.3e\n", round,
                    static_cast<double>(resid), static_cast<double>(scale));
      if (resid >= prev) {
        *dx = px;
        *dy = py;
        *dz = pz;
        break;
      }
      if (resid < S(50) * eps * scale) break;
      px = *dx;
      py = *dy;
      pz = *dz;
      prev = resid;
      VecX<S> ex, ey, ez;
      solve_once(rx, ry, rz, &ex, &ey, &ez);
      *dx += ex;
      *dy += ey;
      *dz += ez;
    }

    // Feasibility-row polish: corrections with a zero cone-row right-hand
    // side leave the cone-row residual exactly as it is (the step assembly
    // absorbs it into the complementarity equation) while driving the dual
    // and equality rows to roundoff. Unlike the full refinement above this
    // cannot be poisoned by the cone row's measurement noise floor.
    prev = std::numeric_limits<S>::infinity();
    const VecX<S> zero_bz = VecX<S>::Zero(bz.size());
    for (int round = 0; round < 3; ++round) {
      const VecX<S> rx = bx - (prob_.a.transpose() * *dy +
                               prob_.g.transpose() * *dz);
      const VecX<S> ry = by - prob_.a * *dx;
      const S resid = std::max(rx.cwiseAbs().maxCoeff(),
                               ry.size() ? ry.cwiseAbs().maxCoeff() : S(0));
      if (trace_)
        std::printf("    kkt polish %d resid %.3e scale %.3e\n", round,
                    static_cast<double>(resid), static_cast<double>(scale));
      if (resid >= prev) {
        *dx = px;
        *dy = py;
        *dz = pz;
        break;
      }
      if (resid < S(5) * eps * scale) break;
      px = *dx;
      py = *dy;
      pz = *dz;
      prev = resid;
      VecX<S> ex, ey, ez;
      solve_once(rx, ry, zero_bz, &ex, &ey, &ez);
      *dx += ex;
      *dy += ey;
      *dz += ez;
    }
  }

 private:
  void solve_once(const VecX<S>& bx, const VecX<S>& by, const VecX<S>& bz,
                  VecX<S>* dx, VecX<S>* dy, VecX<S>* dz) const {
    const VecX<S> t1 =
        bx + prob_.g.transpose() * apply_hinv<S>(lay_, *sc_, bz);
    if (neq_ > 0) {
      const VecX<S> rhs_y = prob_.a * llt_.solve(t1) - by;
      *dy = schur_llt_.solve(rhs_y);
      *dx = llt_.solve(t1 - prob_.a.transpose() * *dy);
    } else {
      *dy = VecX<S>::Zero(0);
      *dx = llt_.solve(t1);
    }
    *dz = apply_hinv<S>(lay_, *sc_, prob_.g * *dx - bz);
  }

  const ProblemData<S>& prob_;
  const ConeLayout& lay_;
  int nvar_, neq_;
  const std::vector<ConelpOptions::PsdVarBlock>* hints_;
  std::vector<int> hinted_block_;
  std::vector<std::vector<int>> row_ij_;
  std::vector<int> generic_rows_;
  std::vector<RowRep<S>> rows_;

  const Scaling<S>* sc_ = nullptr;
  bool trace_ = false;
  MatX<S> m_;
  Eigen::LLT<MatX<S>> llt_;
  Eigen::LLT<MatX<S>> schur_llt_;
};

// ===== one precision pass ==================================================

// Best iterate of a lower-precision pass, tau-normalized, handed to a rerun
// at a wider mantissa so it resumes near the endgame instead of retracing
// the whole path.
struct ConelpWarmStart {
  VecD x, y, z, s;
};

template <typename S>
ConelpResult run_impl(const ConelpProblem& prob0, const ConelpOptions& opt,
                      const ConelpWarmStart* warm = nullptr) {
  const ConeLayout lay = ConeLayout::build(prob0.cones);
  const ProblemData<S> prob = ProblemData<S>::from(prob0);
  const int n = static_cast<int>(prob.c.size());
  const int p = static_cast<int>(prob.b.size());
  const int m = lay.total;
  const S nu = S(prob0.cones.barrier_degree());

  const S resx0 = std::max(S(1), prob.c.norm());
  const S resy0 = std::max(S(1), prob.b.norm());
  const S resz0 = std::max(S(1), prob.h.norm());

  ConelpResult res;
  res.x = VecD::Zero(n);
  res.y = VecD::Zero(p);
  res.z = VecD::Zero(m);
  res.s = VecD::Zero(m);

  KktEngine<S> kkt(prob, lay, opt);

  // --- initial point -------------------------------------------------------
  VecX<S> x, y, z, s;
  S tau = S(1), kappa = S(1);
  if (warm != nullptr) {
    // Resume from the supplied iterate. It already sits deep in the
    // endgame, so only a tiny inward nudge is applied (clearance for the
    // scaling factorizations at this precision) and kappa is placed on the
    // central path of the restored duality gap.
    x = warm->x.cast<S>();
    y = warm->y.cast<S>();
    z = warm->z.cast<S>();
    s = warm->s.cast<S>();
    nudge_into_cone<S>(lay, s, S(1e-12));
    nudge_into_cone<S>(lay, z, S(1e-12));
    kappa = std::max(std::numeric_limits<S>::min(), s.dot(z) / nu);
  } else {
    // Cold start: two identity-scaled least-squares solves.
    Scaling<S> ident;
    ident.d = VecX<S>::Ones(lay.nonneg);
    ident.dinv = ident.d;
    ident.w = ident.d;
    ident.lam_lp = ident.d;
    ident.blocks.resize(lay.order.size());
    for (size_t b = 0; b < lay.order.size(); ++b) {
      const int q = lay.order[b];
      ident.blocks[b].r = MatX<S>::Identity(q, q);
      ident.blocks[b].rinv = ident.blocks[b].r;
      ident.blocks[b].t = ident.blocks[b].r;
      ident.blocks[b].tinv = ident.blocks[b].r;
      ident.blocks[b].lam = VecX<S>::Ones(q);
    }
    if (!kkt.factor(ident)) {
      res.detail = "initial factorization failed";
      return res;
    }
    VecX<S> q_init, y_dual;
    kkt.solve(VecX<S>::Zero(n), prob.b, prob.h, &x, &y, &q_init);
    s = -q_init;
    shift_into_cone<S>(lay, s);

    VecX<S> x_unused;
    kkt.solve(-prob.c, VecX<S>::Zero(p), VecX<S>::Zero(m), &x_unused,
              &y_dual, &z);
    y = y_dual;
    shift_into_cone<S>(lay, z);
  }

  const S tol = S(opt.tol);
  Scaling<S> sc;

  // Residuals of the current triple for the stopping tests; refreshed at
  // the top of each iteration and reused by the direction solves.
  VecX<S> rx, ry, rz;
  S rt = S(0);

  // Evaluates the stopping tests at (x, y, z, s, tau, kappa). Fills the
  // metric fields of res and returns true when a terminal status was
  // recognized (optimal or an infeasibility certificate).
  const auto classify = [&](int iter) {
    rx = prob.a.transpose() * y + prob.g.transpose() * z +
         prob.c * tau;                        // dual residual
    ry = prob.a * x - prob.b * tau;           // primal equality
    rz = prob.g * x + s - prob.h * tau;       // primal cone
    rt = kappa + prob.c.dot(x) + prob.b.dot(y) + prob.h.dot(z);

    const S pcost = prob.c.dot(x) / tau;
    const S dcost = -(prob.b.dot(y) + prob.h.dot(z)) / tau;
    const S gap = s.dot(z) / (tau * tau);
    const S pres =
        std::max(ry.size() ? ry.norm() / resy0 : S(0), rz.norm() / resz0) /
        tau;
    const S dres = rx.norm() / resx0 / tau;

    res.pcost = static_cast<double>(pcost);
    res.dcost = static_cast<double>(dcost);
    res.gap = static_cast<double>(gap);
    res.pres = static_cast<double>(pres);
    res.dres = static_cast<double>(dres);
    res.iterations = iter;

    if (opt.trace)
      std::printf(
          "conelp %3d  pcost % .6e  dcost % .6e  gap %.3e  pres %.3e  "
          "dres %.3e  tau %.3e  kappa %.3e\n",
          iter, static_cast<double>(pcost), static_cast<double>(dcost),
          static_cast<double>(gap), static_cast<double>(pres),
          static_cast<double>(dres), static_cast<double>(tau),
          static_cast<double>(kappa));

    if (pres <= tol && dres <= tol &&
        gap <= tol * std::max({S(1), std::abs(pcost), std::abs(dcost)})) {
      res.status = ConelpStatus::kOptimal;
      res.x = to_double<S>(VecX<S>(x / tau));
      res.y = to_double<S>(VecX<S>(y / tau));
      res.z = to_double<S>(VecX<S>(z / tau));
      res.s = to_double<S>(VecX<S>(s / tau));
      return true;
    }

    const S db = -(prob.h.dot(z) + prob.b.dot(y));
    if (db > S(0) &&
        (prob.a.transpose() * y + prob.g.transpose() * z).norm() / resx0 <=
            tol * db) {
      res.status = ConelpStatus::kPrimalInfeasible;
      res.detail = "primal infeasibility certificate found";
      res.y = to_double<S>(VecX<S>(y / db));
      res.z = to_double<S>(VecX<S>(z / db));
      res.x.setZero();
      res.s.setZero();
      return true;
    }
    const S dc = -prob.c.dot(x);
    if (dc > S(0) &&
        std::max((prob.a * x).size() ? (prob.a * x).norm() / resy0 : S(0),
                 (prob.g * x + s).norm() / resz0) <= tol * dc) {
      res.status = ConelpStatus::kDualInfeasible;
      res.detail = "dual infeasibility certificate found";
      res.x = to_double<S>(VecX<S>(x / dc));
      res.s = to_double<S>(VecX<S>(s / dc));
      res.y.setZero();
      res.z.setZero();
      return true;
    }
    return false;
  };

  // Best iterate seen so far, by worst scaled residual. Restored before
  // giving up so a late misstep cannot spoil an earlier good iterate.
  struct Snapshot {
    VecX<S> x, y, z, s;
    S tau = S(1), kappa = S(1);
    S score = std::numeric_limits<S>::infinity();
    int iter = 0;
  } best;

  S stall_ref = std::numeric_limits<S>::infinity();
  int stall_iter = 0;

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    // --- residuals and stopping tests --------------------------------------
    if (classify(iter)) return res;

    const S score = std::max(
        {S(res.pres), S(res.dres),
         S(res.gap) / std::max({S(1), std::abs(S(res.pcost)),
                                std::abs(S(res.dcost))})});
    if (score < best.score)
      best = Snapshot{x, y, z, s, tau, kappa, score, iter};

    // Endgame cut-off: once the iterate is within striking distance of the
    // tolerance, a score that stops halving means the steps have collapsed
    // into factorization noise and further iterations only repeat the
    // pattern. Far from the target the run is left alone so slow phases
    // (and infeasibility-certificate hunts) are not interrupted.
    if (score <= S(0.5) * stall_ref) {
      stall_ref = score;
      stall_iter = iter;
    } else if (iter - stall_iter >= 4 && best.score <= S(1e4) * tol) {
      res.detail = "progress stalled";
      break;
    }

    if (iter == opt.max_iter) break;

    // --- Nesterov-Todd scaling and factorization ---------------------------
    if (!compute_scaling<S>(lay, s, z, &sc)) {
      res.detail = "iterate left the cone interior";
      break;
    }
    if (!kkt.factor(sc)) {
      res.detail = "normal matrix factorization failed";
      break;
    }
    const S mu = (s.dot(z) + tau * kappa) / (nu + S(1));

    // --- common solve for the tau column -----------------------------------
    VecX<S> u1, v1, w1;
    kkt.solve(-prob.c, prob.b, prob.h, &u1, &v1, &w1);
    const S denom_tau =
        prob.c.dot(u1) + prob.b.dot(v1) + prob.h.dot(w1) - kappa / tau;

    const auto take_step = [&](S eta, const VecX<S>& wjdiv, S rho_tau,
                               VecX<S>* dx, VecX<S>* dy, VecX<S>* dz,
                               VecX<S>* ds, S* dtau, S* dkappa) {
      VecX<S> u2, v2, w2;
      kkt.solve(-eta * rx, -eta * ry, -eta * rz - wjdiv, &u2, &v2, &w2);
      const S num = -eta * rt - rho_tau / tau -
                    (prob.c.dot(u2) + prob.b.dot(v2) + prob.h.dot(w2));
      *dtau = num / denom_tau;
      *dx = u2 + *dtau * u1;
      *dy = v2 + *dtau * v1;
      *dz = w2 + *dtau * w1;
      // ds from the cone-row equation G dx + ds - h dtau = -eta rz rather
      // than from wjdiv - H dz: the two agree up to the linear-solve
      // residual, but this form keeps the iterate's feasibility budget
      // exact at roundoff even when the scaling is ill-conditioned, and
      // the complementarity equation absorbs the solve error instead.
      *ds = -eta * rz - prob.g * *dx + *dtau * prob.h;
      *dkappa = (rho_tau - kappa * *dtau) / tau;
    };

    // --- predictor ----------------------------------------------------------
    VecX<S> dx_a, dy_a, dz_a, ds_a;
    S dtau_a, dkappa_a;
    take_step(S(1), VecX<S>(-s), -tau * kappa, &dx_a, &dy_a, &dz_a, &ds_a,
              &dtau_a, &dkappa_a);

    const VecX<S> ws_a = apply_winv<S>(lay, sc, ds_a);
    const VecX<S> wz_a = apply_wt<S>(lay, sc, dz_a);
    S alpha_max = std::min(max_cone_step<S>(lay, sc, ws_a),
                           max_cone_step<S>(lay, sc, wz_a));
    if (dtau_a < S(0)) alpha_max = std::min(alpha_max, -tau / dtau_a);
    if (dkappa_a < S(0)) alpha_max = std::min(alpha_max, -kappa / dkappa_a);
    const S alpha_aff = std::min(S(1), alpha_max);

    const S mu_aff =
        ((s + alpha_aff * ds_a).dot(z + alpha_aff * dz_a) +
         (tau + alpha_aff * dtau_a) * (kappa + alpha_aff * dkappa_a)) /
        (nu + S(1));
    S sigma = std::pow(std::max(S(0), mu_aff / mu), S(3));
    sigma = std::min(S(1), sigma);

    // --- corrector ----------------------------------------------------------
    const VecX<S> cross = jordan_product<S>(lay, ws_a, wz_a);
    const VecX<S> rho_s = corrector_rhs<S>(lay, sc, cross, sigma * mu);
    const VecX<S> wjdiv =
        apply_w<S>(lay, sc, jordan_divide<S>(lay, sc, rho_s));
    const S rho_tau = sigma * mu - tau * kappa - dtau_a * dkappa_a;

    VecX<S> dx, dy, dz, ds;
    S dtau, dkappa;
    take_step(S(1) - sigma, wjdiv, rho_tau, &dx, &dy, &dz, &ds, &dtau,
              &dkappa);

    const VecX<S> ws = apply_winv<S>(lay, sc, ds);
    const VecX<S> wz = apply_wt<S>(lay, sc, dz);
    S step_max = std::min(max_cone_step<S>(lay, sc, ws),
                          max_cone_step<S>(lay, sc, wz));
    if (dtau < S(0)) step_max = std::min(step_max, -tau / dtau);
    if (dkappa < S(0)) step_max = std::min(step_max, -kappa / dkappa);
    const S alpha = std::min(S(1), S(0.99) * step_max);

    if (opt.trace)
      std::printf("    step alpha %.3e sigma %.3e alpha_aff %.3e\n",
                  static_cast<double>(alpha), static_cast<double>(sigma),
                  static_cast<double>(alpha_aff));
    if (!(alpha > S(1e-8))) {
      res.detail = "step length collapsed";
      break;
    }

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }

  // No terminal status from the loop: fall back to the best iterate and
  // give it one more classification pass (it may already satisfy a
  // terminal test at this tolerance).
  std::string why = res.detail.empty()
                        ? "maximum iterations reached without convergence"
                        : res.detail;
  if (best.score < std::numeric_limits<S>::infinity()) {
    x = best.x;
    y = best.y;
    z = best.z;
    s = best.s;
    tau = best.tau;
    kappa = best.kappa;
    if (classify(best.iter)) return res;
  }
  res.detail = why;
  res.status = ConelpStatus::kNumericalFailure;
  res.x = to_double<S>(VecX<S>(x / tau));
  res.y = to_double<S>(VecX<S>(y / tau));
  res.z = to_double<S>(VecX<S>(z / tau));
  res.s = to_double<S>(VecX<S>(s / tau));
  return res;
}

// Worst scaled residual of a finished pass, for deciding whether a rerun
// at higher precision is worth the time.
double failure_score(const ConelpResult& r) {
  const double scale =
      std::max({1.0, std::abs(r.pcost), std::abs(r.dcost)});
  return std::max({r.pres, r.dres, r.gap / scale});
}

// ===== data equilibration ==================================================
//
// Ruiz scaling of the stacked constraint matrix. Each variable column and
// each equality row carries its own factor; rows of g must preserve the
// cone, so orthant rows scale freely while all svec rows of one PSD block
// share a single factor (a uniform positive scaling maps the block cone
// onto itself, per-row factors would not). The cost vector is normalized
// last so the objective enters the stopping tests near unit size.

struct Equilibration {
  VecD col, row_a, row_g;
  double cost = 1.0;
};

Equilibration equilibrate(ConelpProblem* prob, ConelpOptions* opt) {
  const int n = static_cast<int>(prob->c.size());
  const int p = static_cast<int>(prob->b.size());
  const int m = static_cast<int>(prob->h.size());

  Equilibration eq;
  eq.col = VecD::Ones(n);
  eq.row_a = VecD::Ones(p);
  eq.row_g = VecD::Ones(m);

  std::vector<std::pair<int, int>> groups;
  for (int i = 0; i < prob->cones.nonneg; ++i) groups.emplace_back(i, i + 1);
  int at = prob->cones.nonneg;
  for (int q : prob->cones.psd) {
    groups.emplace_back(at, at + svec_dim(q));
    at += svec_dim(q);
  }

  for (int round = 0; round < 8; ++round) {
    for (const auto& [lo, hi] : groups) {
      const double mx =
          prob->g.middleRows(lo, hi - lo).cwiseAbs().maxCoeff();
      if (mx > 0.0) {
        const double f = 1.0 / std::sqrt(mx);
        prob->g.middleRows(lo, hi - lo) *= f;
        eq.row_g.segment(lo, hi - lo) *= f;
      }
    }
    for (int i = 0; i < p; ++i) {
      const double mx = prob->a.row(i).cwiseAbs().maxCoeff();
      if (mx > 0.0) {
        const double f = 1.0 / std::sqrt(mx);
        prob->a.row(i) *= f;
        eq.row_a[i] *= f;
      }
    }
    for (int j = 0; j < n; ++j) {
      double mx = prob->g.col(j).cwiseAbs().maxCoeff();
      if (p > 0) mx = std::max(mx, prob->a.col(j).cwiseAbs().maxCoeff());
      if (mx > 0.0) {
        const double f = 1.0 / std::sqrt(mx);
        prob->g.col(j) *= f;
        if (p > 0) prob->a.col(j) *= f;
        eq.col[j] *= f;
      }
    }
  }

  prob->b.array() *= eq.row_a.array();
  prob->h.array() *= eq.row_g.array();
  prob->c.array() *= eq.col.array();
  const double cmax = prob->c.cwiseAbs().maxCoeff();
  if (cmax > 1.0) {
    eq.cost = 1.0 / cmax;
    prob->c *= eq.cost;
  }

  // The embedding hints mirror rows of g entry for entry and must track
  // the rescale exactly.
  for (auto& hint : opt->psd_var_blocks) {
    int lo = prob->cones.nonneg;
    for (int b = 0; b < hint.block; ++b) lo += svec_dim(prob->cones.psd[b]);
    const double rho = eq.row_g[lo];
    for (size_t t = 0; t < hint.cols.size(); ++t)
      for (int r = 0; r < 2; ++r)
        hint.cols[t].val[r] *=
            rho * eq.col[hint.param0 + static_cast<int>(t)];
  }
  return eq;
}

// Map a solution (or certificate) of the scaled problem back to the
// original coordinates. Certificates are rays, so the uniform 1/cost on
// the dual side is harmless there.
void unscale_solution(const Equilibration& eq, ConelpResult* res) {
  res->x.array() *= eq.col.array();
  if (res->y.size())
    res->y.array() *= eq.row_a.array() / eq.cost;
  res->z.array() *= eq.row_g.array() / eq.cost;
  res->s.array() /= eq.row_g.array();
}

constexpr const char* kDescaleDetail = "solution lost tolerance after descaling";

// Recompute the reported metrics against the original data. An optimal
// flag that does not survive descaling is downgraded so the caller (and
// the extended-precision retry) see the honest numbers.
void refresh_metrics(const ConelpProblem& prob, const ConelpOptions& opt,
                     ConelpResult* res) {
  if (res->status == ConelpStatus::kPrimalInfeasible ||
      res->status == ConelpStatus::kDualInfeasible)
    return;  // certificate quality was already judged on the scaled ray
  const double resx0 = std::max(1.0, prob.c.norm());
  const double resy0 = std::max(1.0, prob.b.norm());
  const double resz0 = std::max(1.0, prob.h.norm());
  res->pcost = prob.c.dot(res->x);
  res->dcost = -(prob.b.dot(res->y) + prob.h.dot(res->z));
  res->gap = res->s.dot(res->z);
  const double rz = (prob.g * res->x + res->s - prob.h).norm() / resz0;
  const double ry =
      prob.b.size() ? (prob.a * res->x - prob.b).norm() / resy0 : 0.0;
  res->pres = std::max(ry, rz);
  res->dres =
      (prob.a.transpose() * res->y + prob.g.transpose() * res->z + prob.c)
          .norm() /
      resx0;
  const double scale =
      std::max({1.0, std::abs(res->pcost), std::abs(res->dcost)});
  const bool meets = res->pres <= opt.tol && res->dres <= opt.tol &&
                     res->gap <= opt.tol * scale;
  if (res->status == ConelpStatus::kOptimal && !meets) {
    res->status = ConelpStatus::kNumericalFailure;
    res->detail = kDescaleDetail;
  } else if (res->status == ConelpStatus::kNumericalFailure && meets) {
    // A pass run at a tightened internal tolerance may stall beyond the
    // caller's target; its best iterate is still a certified optimum once
    // every condition passes on the original data.
    res->status = ConelpStatus::kOptimal;
    res->detail.clear();
  }
}

}  // namespace

// ===== public types ========================================================

int ConeSpec::packed_dim() const {
  int at = nonneg;
  for (int q : psd) at += svec_dim(q);
  return at;
}

int ConeSpec::barrier_degree() const {
  int nu = nonneg;
  for (int q : psd) nu += q;
  return nu;
}

void ConeSpec::validate() const {
  require(nonneg >= 0, "nonnegative cone dimension must be >= 0");
  for (int q : psd) require(q >= 1, "PSD block order must be >= 1");
  require(packed_dim() >= 1, "cone must have positive dimension");
}

void ConelpProblem::validate() const {
  cones.validate();
  const int n = static_cast<int>(c.size());
  require(n >= 1, "problem must have at least one variable");
  require(g.rows() == cones.packed_dim() && g.cols() == n,
          "inequality matrix shape mismatch");
  require(h.size() == g.rows(), "inequality offset shape mismatch");
  require(a.cols() == n || a.rows() == 0, "equality matrix shape mismatch");
  require(b.size() == a.rows(), "equality offset shape mismatch");
}

const char* conelp_status_name(ConelpStatus s) {
  switch (s) {
    case ConelpStatus::kOptimal:
      return "optimal";
    case ConelpStatus::kPrimalInfeasible:
      return "primal-infeasible";
    case ConelpStatus::kDualInfeasible:
      return "dual-infeasible";
    case ConelpStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

// ===== entry point =========================================================

ConelpResult solve_conelp(const ConelpProblem& prob,
                          const ConelpOptions& opt) {
  prob.validate();

  // Equilibrate once; both precision passes run on the same scaled data,
  // so the retry stays deterministic. Results are mapped back and their
  // metrics recomputed against the original problem before anyone sees
  // them.
  ConelpProblem scaled = prob;
  ConelpOptions sopt = opt;
  const Equilibration eq = equilibrate(&scaled, &sopt);
  const auto finish = [&](ConelpResult r) {
    unscale_solution(eq, &r);
    refresh_metrics(prob, opt, &r);
    return r;
  };

  ConelpResult raw = run_impl<double>(scaled, sopt);
  ConelpResult res = finish(raw);
  if (res.status != ConelpStatus::kNumericalFailure) return res;
  const double score = failure_score(res);

  // A stall with the best iterate within striking distance of the
  // tolerance is almost always the normal-matrix solve running out of
  // digits, not a structural problem; a rerun with a wider mantissa closes
  // the remaining gap. Its internal tolerance is tightened by the observed
  // excess so the result holds up in original units even when descaling
  // costs a couple of digits, and it resumes from the stalled pass's best
  // iterate (kept in scaled coordinates in `raw`) so only the last decades
  // are recomputed at the slower precision. Hopeless runs are returned
  // as-is instead of doubling the runtime.
  if (!std::isfinite(score) || score > 1e4 * opt.tol) return res;
  sopt.tol = opt.tol / std::min(1e6, std::max(100.0, 100.0 * score / opt.tol));
  const bool resumable = raw.iterations > 0 && raw.x.allFinite() &&
                         raw.y.allFinite() && raw.z.allFinite() &&
                         raw.s.allFinite();
  const ConelpWarmStart warm{raw.x, raw.y, raw.z, raw.s};
  if (opt.trace)
    std::printf("conelp: double-precision pass stalled (score %.3e); "
                "%s in extended precision at tolerance %.3e\n",
                score, resumable ? "resuming" : "rerunning", sopt.tol);
  ConelpResult retry = finish(
      run_impl<long double>(scaled, sopt, resumable ? &warm : nullptr));
  if (retry.status != ConelpStatus::kNumericalFailure) return retry;
  return failure_score(retry) < score ? retry : res;
}

}  // namespace isac::conic

// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// svec.hpp: packed symmetric-matrix vectorization and the real embedding
// of Hermitian matrices.
//
// A real symmetric m x m matrix is stored as the column-major lower
// triangle with off-diagonal entries scaled by sqrt(2), so that the packed
// Euclidean inner product equals the Frobenius inner product of the
// matrices. A Hermitian n x n matrix X maps to the real symmetric 2n x 2n
// matrix [[Re X, -Im X], [Im X, Re X]], which is positive semidefinite
// exactly when X is.

#pragma once

#include <vector>

#include "core/common.hpp"

namespace isac::conic {

// Packed dimension of an m x m symmetric matrix.
constexpr int svec_dim(int m) { return m * (m + 1) / 2; }

// Packed index of entry (i, j), i >= j, in column-major lower-triangle
// order.
constexpr int svec_index(int m, int i, int j) {
  return j * m - j * (j - 1) / 2 + (i - j);
}

// Pack a symmetric matrix (only the lower triangle is read).
VecD svec(const MatD& mat);

// Unpack to a full symmetric matrix of order m.
MatD unsvec(const VecD& packed, int m);

// Real symmetric embedding of a Hermitian matrix.
MatD embed_hermitian(const MatC& x);

// Inverse of embed_hermitian; averages the two copies of each entry so the
// result is exactly Hermitian even for slightly asymmetric input.
MatC extract_hermitian(const MatD& e, int n);

// Real parameterization of an n x n Hermitian matrix: n diagonal entries,
// then n(n-1)/2 real parts, then n(n-1)/2 imaginary parts of the strict
// lower triangle, both in column-major order.
constexpr int hermitian_param_count(int n) { return n * n; }

// theta -> X and its adjoint X -> theta for the parameterization above.
MatC hermitian_from_params(const VecD& theta, int n);
VecD params_from_hermitian(const MatC& x);

// Coefficient vector g such that Re tr(C^H X) = g . params(X) for a
// Hermitian coefficient matrix C: [C_ii; 2 Re C_ij; 2 Im C_ij].
VecD hermitian_coeff_vector(const MatC& c);

// Sparse description of one column of the embedding operator E with
// svec(embed_hermitian(X)) = E params(X): each Hermitian parameter touches
// exactly two packed entries of the embedded matrix.
struct EmbeddingColumn {
  int row[2];
  double val[2];
};

// All hermitian_param_count(n) columns of E for order n.
std::vector<EmbeddingColumn> hermitian_embedding_columns(int n);

}  // namespace isac::conic

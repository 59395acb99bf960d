// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// svec.cpp: see svec.hpp.

#include "svec.hpp"

#include <cmath>

namespace isac::conic {

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Index of (i, j), i > j, within the column-major strict lower triangle.
constexpr int strict_lower_index(int n, int i, int j) {
  return j * n - j * (j + 1) / 2 + (i - j - 1);
}

}  // namespace

VecD svec(const MatD& mat) {
  const int m = static_cast<int>(mat.rows());
  VecD v(svec_dim(m));
  int k = 0;
  for (int j = 0; j < m; ++j) {
    v[k++] = mat(j, j);
    for (int i = j + 1; i < m; ++i) v[k++] = kSqrt2 * mat(i, j);
  }
  return v;
}

MatD unsvec(const VecD& packed, int m) {
  MatD mat(m, m);
  int k = 0;
  for (int j = 0; j < m; ++j) {
    mat(j, j) = packed[k++];
    for (int i = j + 1; i < m; ++i) {
      const double e = packed[k++] / kSqrt2;
      mat(i, j) = e;
      mat(j, i) = e;
    }
  }
  return mat;
}

MatD embed_hermitian(const MatC& x) {
  const int n = static_cast<int>(x.rows());
  MatD e(2 * n, 2 * n);
  const MatD re = x.real(), im = x.imag();
  e.topLeftCorner(n, n) = re;
  e.bottomRightCorner(n, n) = re;
  e.bottomLeftCorner(n, n) = im;
  e.topRightCorner(n, n) = -im;
  return e;
}

MatC extract_hermitian(const MatD& e, int n) {
  const MatD re =
      0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
  const MatD im =
      0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
  MatC x = re.cast<cd>() + cd(0.0, 1.0) * im.cast<cd>();
  x = 0.5 * (x + x.adjoint()).eval();
  return x;
}

MatC hermitian_from_params(const VecD& theta, int n) {
  const int nl = n * (n - 1) / 2;
  MatC x(n, n);
  for (int i = 0; i < n; ++i) x(i, i) = theta[i];
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      const int k = strict_lower_index(n, i, j);
      const cd v(theta[n + k], theta[n + nl + k]);
      x(i, j) = v;
      x(j, i) = std::conj(v);
    }
  return x;
}

VecD params_from_hermitian(const MatC& x) {
  const int n = static_cast<int>(x.rows());
  const int nl = n * (n - 1) / 2;
  VecD theta(hermitian_param_count(n));
  for (int i = 0; i < n; ++i) theta[i] = x(i, i).real();
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      const int k = strict_lower_index(n, i, j);
      theta[n + k] = x(i, j).real();
      theta[n + nl + k] = x(i, j).imag();
    }
  return theta;
}

VecD hermitian_coeff_vector(const MatC& c) {
  const int n = static_cast<int>(c.rows());
  const int nl = n * (n - 1) / 2;
  VecD g(hermitian_param_count(n));
  for (int i = 0; i < n; ++i) g[i] = c(i, i).real();
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      const int k = strict_lower_index(n, i, j);
      g[n + k] = 2.0 * c(i, j).real();
      g[n + nl + k] = 2.0 * c(i, j).imag();
    }
  return g;
}

std::vector<EmbeddingColumn> hermitian_embedding_columns(int n) {
  const int m = 2 * n;
  const int nl = n * (n - 1) / 2;
  std::vector<EmbeddingColumn> cols(hermitian_param_count(n));
  for (int i = 0; i < n; ++i) {
    cols[i] = {{svec_index(m, i, i), svec_index(m, n + i, n + i)},
               {1.0, 1.0}};
  }
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      const int k = strict_lower_index(n, i, j);
      cols[n + k] = {{svec_index(m, i, j), svec_index(m, n + i, n + j)},
                     {kSqrt2, kSqrt2}};
      cols[n + nl + k] = {{svec_index(m, n + i, j), svec_index(m, n + j, i)},
                          {kSqrt2, -kSqrt2}};
    }
  return cols;
}

}  // namespace isac::conic

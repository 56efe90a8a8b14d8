// Copyright 2026 The isolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file numeric.hpp
 * @brief Dense linear algebra helpers shared by the modules.
 *
 * Every rank decision thresholds singular values (or eigenvalues) at
 * tol * (largest one).
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "linmap.hpp"

namespace isolab {

/// Largest singular value; 0 for an empty matrix.
inline double op_norm(const ComplexMatrix& x) {
  if (x.size() == 0) return 0.0;
  if (x.rows() == 1 || x.cols() == 1) return x.norm();
  Eigen::JacobiSVD<ComplexMatrix> svd(x);
  return svd.singularValues()(0);
}

/// Orthonormal basis (as columns) of the null space of a.
inline ComplexMatrix null_space(const ComplexMatrix& a, double tol = kDefaultTol) {
  const Index n = a.cols();
  if (n == 0) return ComplexMatrix(0, 0);
  if (a.rows() == 0) return ComplexMatrix::Identity(n, n);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = tol * (sv.size() > 0 ? sv(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut && sv(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

/// Orthonormal basis (as columns) of the column space of a.
inline ComplexMatrix range_frame(const ComplexMatrix& a, double tol = kDefaultTol) {
  if (a.size() == 0) return ComplexMatrix(a.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = tol * sv(0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut && sv(i) > 0.0) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Numerical rank with the relative threshold tol * sigma_max.
inline Index numerical_rank(const ComplexMatrix& a, double tol = kDefaultTol) {
  return range_frame(a, tol).cols();
}

/// Orthogonal projection onto the span of the eigenvectors of the Hermitian h
/// whose eigenvalues exceed tol * (largest absolute eigenvalue).
inline ComplexMatrix spectral_support(const ComplexMatrix& h, double tol = kDefaultTol) {
  const Index n = h.rows();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const auto& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  if (top == 0.0) return p;
  for (Index i = 0; i < n; ++i) {
    if (ev(i) > tol * top) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return p;
}

/// Orthonormal frame of the range of a projection (eigenvalues above 1/2).
inline ComplexMatrix projection_frame(const ComplexMatrix& p) {
  const Index n = p.rows();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (p + p.adjoint()));
  std::vector<Index> keep;
  for (Index i = n - 1; i >= 0; --i)
    if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
  ComplexMatrix f(n, static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) f.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]);
  return f;
}

/// Orthonormal frame of the orthogonal complement of the span of the columns of f.
inline ComplexMatrix complement_frame(const ComplexMatrix& f, Index dim) {
  ComplexMatrix proj = ComplexMatrix::Identity(dim, dim);
  if (f.cols() > 0) proj -= f * f.adjoint();
  return projection_frame(proj);
}

/// Unitary (partial isometry when rank-deficient) factor of the polar decomposition a = W |a|.
inline ComplexMatrix polar_unitary(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Frobenius residual of u u* u - u.
inline double partial_isometry_residual(const ComplexMatrix& u) { return (u * u.adjoint() * u - u).norm(); }

}  // namespace isolab

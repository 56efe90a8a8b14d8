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

// Brute-force reference computations used by the tests.  These deliberately
// avoid the library's own algorithms (closure factorization, falsifier,
// certificate extraction) so the tests compare two independent routes.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Vec flatten(const Mat& x) {
  Vec v(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  return v;
}

inline Mat unflatten(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  Mat x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = v(i * cols + j);
  return x;
}

inline Eigen::Index rank(const Mat& a, double rel = 1e-9) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

inline double norm2(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

/// Orthonormal column basis of the span of the given coordinate columns.
inline Mat orth(const Mat& cols, double rel = 1e-9) {
  if (cols.cols() == 0) return cols;
  Eigen::JacobiSVD<Mat> svd(cols, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(rank(cols, rel));
}

/// Dimension of the smallest span containing seeds closed under x y* z, by
/// repeated rounds over every triple of basis elements.
inline Eigen::Index naive_triple_closure_dim(const std::vector<Mat>& seeds) {
  const Eigen::Index r = seeds.at(0).rows(), s = seeds.at(0).cols();
  Mat span(r * s, static_cast<Eigen::Index>(seeds.size()));
  for (std::size_t i = 0; i < seeds.size(); ++i) span.col(static_cast<Eigen::Index>(i)) = flatten(seeds[i]);
  Mat q = orth(span);
  for (;;) {
    std::vector<Mat> b;
    for (Eigen::Index c = 0; c < q.cols(); ++c) b.push_back(unflatten(q.col(c), r, s));
    Mat grown(r * s, q.cols() + static_cast<Eigen::Index>(b.size() * b.size() * b.size()));
    grown.leftCols(q.cols()) = q;
    Eigen::Index col = q.cols();
    for (const auto& x : b)
      for (const auto& y : b)
        for (const auto& z : b) grown.col(col++) = flatten(x * y.adjoint() * z);
    Mat next = orth(grown);
    if (next.cols() == q.cols()) return q.cols();
    q = next;
  }
}

/// Dimension of the *-algebra generated by seeds, by rounds over all pairs.
inline Eigen::Index naive_cstar_closure_dim(const std::vector<Mat>& seeds) {
  const Eigen::Index n = seeds.at(0).rows();
  Mat span(n * n, 2 * static_cast<Eigen::Index>(seeds.size()));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    span.col(2 * static_cast<Eigen::Index>(i)) = flatten(seeds[i]);
    span.col(2 * static_cast<Eigen::Index>(i) + 1) = flatten(seeds[i].adjoint());
  }
  Mat q = orth(span);
  for (;;) {
    std::vector<Mat> b;
    for (Eigen::Index c = 0; c < q.cols(); ++c) b.push_back(unflatten(q.col(c), n, n));
    Mat grown(n * n, q.cols() + static_cast<Eigen::Index>(b.size() * b.size()));
    grown.leftCols(q.cols()) = q;
    Eigen::Index col = q.cols();
    for (const auto& x : b)
      for (const auto& y : b) grown.col(col++) = flatten(x * y);
    Mat next = orth(grown);
    if (next.cols() == q.cols()) return q.cols();
    q = next;
  }
}

/// Gaussian matrix with independent standard complex entries.
inline Mat gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = C(nd(rng), nd(rng));
  return x;
}

/// Unitary from a Householder QR of a Gaussian matrix.
inline Mat unitary(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Mat> qr(gaussian(n, n, rng));
  return qr.householderQ() * Mat::Identity(n, n);
}

/// Random positive semidefinite matrix of the given rank (trace normalized to 1).
inline Mat random_psd(Eigen::Index n, Eigen::Index rank, std::mt19937_64& rng) {
  Mat g = gaussian(n, rank, rng);
  Mat p = g * g.adjoint();
  return p / p.trace().real();
}

/// Minimum eigenvalue of the Hermitian part.
inline double min_eig(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  return es.eigenvalues()(0);
}

/// Applies id_k (x) T blockwise, where T is given by a callable on m x n blocks.
inline Mat amplify_apply(const std::function<Mat(const Mat&)>& t, Eigen::Index m, Eigen::Index n, Eigen::Index r,
                         Eigen::Index s, const Mat& x) {
  const Eigen::Index k = x.rows() / m;
  Mat y(k * r, k * s);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) y.block(a * r, b * s, r, s) = t(x.block(a * m, b * n, m, n));
  return y;
}

/// Max over real sign vectors f in {-1, 1}^k1 of ||M f||_inf.
inline double sign_vector_max(const Mat& m) {
  const Eigen::Index k1 = m.cols();
  double best = 0.0;
  for (unsigned long mask = 0; mask < (1UL << k1); ++mask) {
    Vec f(k1);
    for (Eigen::Index i = 0; i < k1; ++i) f(i) = (mask >> i) & 1UL ? -1.0 : 1.0;
    best = std::max(best, (m * f).cwiseAbs().maxCoeff());
  }
  return best;
}

/// Isometry test for an l_inf -> l_inf map with real entries: checks
/// ||T f||_inf = ||f||_inf on every f in {-1, 0, 1}^k1.  Sign vectors attain
/// the norm of every row functional and the coordinate vectors detect any
/// missing isometric direction, so this finite set decides the question.
inline bool brute_force_linf_isometry(const Mat& m, double tol) {
  const Eigen::Index k1 = m.cols();
  long total = 1;
  for (Eigen::Index i = 0; i < k1; ++i) total *= 3;
  for (long code = 1; code < total; ++code) {
    Vec f(k1);
    long c = code;
    for (Eigen::Index i = 0; i < k1; ++i, c /= 3) f(i) = static_cast<double>(c % 3) - 1.0;
    const double lhs = (m * f).cwiseAbs().maxCoeff();
    const double rhs = f.cwiseAbs().maxCoeff();
    if (std::abs(lhs - rhs) > tol) return false;
  }
  return true;
}

/// Amplified positivity by probing: applies id_k (x) T to random rank-one and
/// full-rank PSD matrices for k = 1..max_level and returns the least
/// eigenvalue seen (relative to the probe trace).
inline double probed_min_eigenvalue(const std::function<Mat(const Mat&)>& t, Eigen::Index n, Eigen::Index r,
                                    Eigen::Index max_level, int probes, std::mt19937_64& rng) {
  double worst = std::numeric_limits<double>::infinity();
  for (int p = 0; p < probes; ++p) {
    const Eigen::Index k = 1 + p % max_level;
    const Eigen::Index rank = p % 4 == 3 ? k * n : 1;
    const Mat x = random_psd(k * n, rank, rng);
    worst = std::min(worst, min_eig(amplify_apply(t, n, n, r, r, x)));
  }
  return worst;
}

/// Largest |‖T_k(x)‖ / ‖x‖ - 1| over random Gaussian x at levels 1..max_level.
inline double probed_isometry_gap(const std::function<Mat(const Mat&)>& t, Eigen::Index m, Eigen::Index n,
                                  Eigen::Index r, Eigen::Index s, Eigen::Index max_level, int probes,
                                  std::mt19937_64& rng) {
  double worst = 0.0;
  for (Eigen::Index k = 1; k <= max_level; ++k)
    for (int p = 0; p < probes; ++p) {
      Mat x = gaussian(k * m, k * n, rng);
      // Low-rank probes reach norm deficits that full-rank ones average away.
      if (p % 2 == 1) x = x.col(0) * gaussian(1, k * n, rng);
      worst = std::max(worst, std::abs(norm2(amplify_apply(t, m, n, r, s, x)) / norm2(x) - 1.0));
    }
  return worst;
}

/// Complex analogue of brute_force_linf_isometry: f ranges over vectors whose
/// entries are 0 or one of `phases` equally spaced unimodular scalars.
inline bool phase_grid_linf_isometry(const Mat& m, int phases, double tol) {
  const Eigen::Index k1 = m.cols();
  const int base = phases + 1;
  long total = 1;
  for (Eigen::Index i = 0; i < k1; ++i) total *= base;
  const double two_pi = 8.0 * std::atan(1.0);
  for (long code = 1; code < total; ++code) {
    Vec f(k1);
    long c = code;
    for (Eigen::Index i = 0; i < k1; ++i, c /= base) {
      const int d = static_cast<int>(c % base);
      f(i) = d == 0 ? C(0.0) : std::polar(1.0, two_pi * (d - 1) / phases);
    }
    const double lhs = (m * f).cwiseAbs().maxCoeff();
    if (lhs > 1.0 + tol) return false;
    if (lhs < 1.0 - tol) return false;
  }
  return true;
}

}  // namespace oracle

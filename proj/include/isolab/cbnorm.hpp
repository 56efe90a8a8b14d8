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
 * @file cbnorm.hpp
 * @brief Amplified norm search, Choi matrices, complete positivity and
 * complete contractivity certificates.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linmap.hpp"
#include "numeric.hpp"

namespace isolab {

/// Lower/upper bounds on a norm, with a witness attaining the lower bound.
struct NormEstimate {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::optional<ComplexMatrix> witness;
};

/// Outcome of a search over unit-norm X in M_{Lm,Ln} for ||T_L(X)|| != ||X||.
struct FalsifierResult {
  Index level = 1;
  NormEstimate expansion;  ///< largest ratio ||T_L X|| / ||X|| found
  double min_ratio = std::numeric_limits<double>::infinity();
  std::optional<ComplexMatrix> min_witness;  ///< smallest ratio found

  bool expansion_found(double tol = kDefaultTol) const { return expansion.lower > 1.0 + tol; }
  bool deficit_found(double tol = kDefaultTol) const { return min_ratio < 1.0 - tol; }
  bool violation(double tol = kDefaultTol) const { return expansion_found(tol) || deficit_found(tol); }

  /// The witness of the larger violation, if any.
  std::optional<ComplexMatrix> witness(double tol = kDefaultTol) const {
    const double up = expansion.lower - 1.0, down = 1.0 - min_ratio;
    if (expansion_found(tol) && (!deficit_found(tol) || up >= down)) return expansion.witness;
    if (deficit_found(tol)) return min_witness;
    return std::nullopt;
  }

  double witness_ratio(double tol = kDefaultTol) const {
    const double up = expansion.lower - 1.0, down = 1.0 - min_ratio;
    if (expansion_found(tol) && (!deficit_found(tol) || up >= down)) return expansion.lower;
    return min_ratio;
  }
};

namespace detail {

inline ComplexMatrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  ComplexMatrix x(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      x(i, j) = Complex(re, im);
    }
  return x;
}

/// Hilbert-Schmidt adjoint of id_L (x) T evaluated on W in M_{Lr,Ls}.
inline ComplexMatrix apply_amplified_hs_adjoint(const MatrixMap& t, Index level, const ComplexMatrix& w) {
  const Index m = t.domain().rows(), n = t.domain().cols();
  const Index r = t.codomain().rows(), s = t.codomain().cols();
  ComplexMatrix g(level * m, level * n);
  for (Index a = 0; a < level; ++a)
    for (Index b = 0; b < level; ++b) {
      const auto blk = w.block(a * r, b * s, r, s);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) g(a * m + i, b * n + j) = (t.unit_image(i, j).cwiseProduct(blk.conjugate())).sum();
    }
  // g holds conj(<T(E_ij), W>); return its conjugate.
  return g.conjugate();
}

/// Power iteration for the top singular pair of y, warm-started from v.
inline double top_singular_pair(const ComplexMatrix& y, ComplexVector& u, ComplexVector& v, int iters = 60) {
  double sigma = 0.0;
  if (v.size() != y.cols() || v.norm() == 0.0) v = ComplexVector::Ones(y.cols());
  v.normalize();
  for (int it = 0; it < iters; ++it) {
    u = y * v;
    const double un = u.norm();
    if (un == 0.0) return 0.0;
    u /= un;
    v = y.adjoint() * u;
    const double next = v.norm();
    if (next == 0.0) return 0.0;
    v /= next;
    if (std::abs(next - sigma) <= 1e-14 * next) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  return sigma;
}

inline double ratio(const MatrixMap& t, Index level, const ComplexMatrix& x) {
  const double nx = op_norm(x);
  if (nx == 0.0) return 0.0;
  return op_norm(apply_amplified(t, level, x)) / nx;
}

/// Alternating maximization of Re xi* T_L(X) eta over ||X|| <= 1 and unit xi, eta.
inline ComplexMatrix ascend(const MatrixMap& t, Index level, ComplexMatrix x, int iters) {
  ComplexVector u, v;
  double last = -1.0;
  for (int it = 0; it < iters; ++it) {
    const ComplexMatrix y = apply_amplified(t, level, x);
    const double sigma = top_singular_pair(y, u, v);
    if (sigma == 0.0) break;
    const ComplexMatrix g = apply_amplified_hs_adjoint(t, level, u * v.adjoint());
    if (g.norm() == 0.0) break;
    x = polar_unitary(g);
    if (sigma <= last * (1.0 + 1e-12)) break;
    last = sigma;
  }
  return x;
}

/// Block matrix whose (a, b) block is E_ba, the classical transpose witness.
inline ComplexMatrix swap_start(Index m, Index n, Index level) {
  ComplexMatrix x = ComplexMatrix::Zero(level * m, level * n);
  for (Index a = 0; a < std::min(level, n); ++a)
    for (Index b = 0; b < std::min(level, m); ++b) x(a * m + b, b * n + a) = 1.0;
  return x;
}

}  // namespace detail

/**
 * Randomized search for X in M_{level*m, level*n} with ||T_level(X)|| != ||X||.
 *
 * The expansion side runs alternating maximization (which only increases
 * ||T_L(X)|| / ||X||) from structured starts, the supplied warm starts and
 * `trials` Gaussian starts.  The deficit side evaluates matrix units, the
 * direction of least Frobenius gain and random starts refined by a short
 * hill climb at level 1, embedded into the requested level.  Never certifies
 * isometry; only violations are conclusive.
 */
inline FalsifierResult amplified_isometry_falsifier(const MatrixMap& t, Index level, Index trials, std::uint64_t seed,
                                                    const std::vector<ComplexMatrix>& warm_starts = {}) {
  if (level < 1) throw ArgumentError("amplified_isometry_falsifier: level must be positive");
  const Index m = t.domain().rows(), n = t.domain().cols();
  std::mt19937_64 rng(seed);
  FalsifierResult res;
  res.level = level;

  auto consider_max = [&](const ComplexMatrix& x) {
    const double q = detail::ratio(t, level, x);
    if (!res.expansion.witness || q > res.expansion.lower) {
      res.expansion.lower = q;
      res.expansion.witness = x / op_norm(x);
    }
  };
  auto consider_min = [&](const ComplexMatrix& x) {
    const double nx = op_norm(x);
    if (nx == 0.0) return;
    const double q = detail::ratio(t, level, x);
    if (q < res.min_ratio) {
      res.min_ratio = q;
      res.min_witness = x / nx;
    }
  };
  auto embed = [&](const ComplexMatrix& x1) {
    ComplexMatrix x = ComplexMatrix::Zero(level * m, level * n);
    x.block(0, 0, x1.rows(), x1.cols()) = x1;
    return x;
  };
  const int ascent_iters = 80;

  // Expansion search.
  std::vector<ComplexMatrix> starts;
  starts.push_back(detail::swap_start(m, n, level));
  starts.push_back(ComplexMatrix::Identity(level * m, level * n));
  for (const auto& w : warm_starts) {
    if (w.rows() <= level * m && w.cols() <= level * n) starts.push_back(embed(w));
  }
  for (Index k = 0; k < trials; ++k) starts.push_back(detail::gaussian_matrix(level * m, level * n, rng));
  for (const auto& s0 : starts) {
    if (s0.norm() == 0.0) continue;
    consider_max(s0);
    consider_max(detail::ascend(t, level, s0 / op_norm(s0), ascent_iters));
  }

  // Deficit search.
  const Shape dom = t.domain();
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) consider_min(embed(matrix_unit(dom, i, j)));
  {
    Eigen::JacobiSVD<ComplexMatrix> svd(t.coordinate_matrix(), Eigen::ComputeFullV);
    const ComplexVector v = svd.matrixV().col(svd.matrixV().cols() - 1);
    consider_min(embed(from_coords(v, dom)));
  }
  std::normal_distribution<double> nd(0.0, 1.0);
  for (Index k = 0; k < std::max<Index>(2, trials / 2); ++k) {
    ComplexMatrix x = detail::gaussian_matrix(m, n, rng);
    double best = detail::ratio(t, 1, x);
    double step = 0.5;
    for (int it = 0; it < 40 && step > 1e-4; ++it) {
      const ComplexMatrix cand = x / op_norm(x) + step * detail::gaussian_matrix(m, n, rng) / std::sqrt(double(m * n));
      const double q = detail::ratio(t, 1, cand);
      if (q < best) {
        best = q;
        x = cand;
      } else {
        step *= 0.7;
      }
    }
    consider_min(embed(x));
  }
  if (level > 1) {
    for (Index k = 0; k < std::max<Index>(1, trials / 4); ++k)
      consider_min(detail::gaussian_matrix(level * m, level * n, rng));
  }
  return res;
}

/**
 * Falsifier runs at levels 1..max_level where each level is warm-started from
 * the previous level's best expansion witness, so the recorded estimates never
 * decrease with the level.
 */
inline std::vector<FalsifierResult> amplified_norm_profile(const MatrixMap& t, Index max_level, Index trials,
                                                           std::uint64_t seed) {
  std::vector<FalsifierResult> out;
  std::vector<ComplexMatrix> warm;
  for (Index k = 1; k <= max_level; ++k) {
    out.push_back(amplified_isometry_falsifier(t, k, trials, seed + static_cast<std::uint64_t>(k), warm));
    warm = {*out.back().expansion.witness};
  }
  return out;
}

/// Choi matrix of T: shape (r*m, s*n), block (i, j) equal to T(E_ij).
struct ChoiMatrix {
  Index m = 0, n = 0, r = 0, s = 0;
  ComplexMatrix matrix;

  ComplexMatrix block(Index i, Index j) const { return matrix.block(i * r, j * s, r, s); }
};

inline ChoiMatrix choi_matrix(const MatrixMap& t) {
  ChoiMatrix c;
  c.m = t.domain().rows();
  c.n = t.domain().cols();
  c.r = t.codomain().rows();
  c.s = t.codomain().cols();
  c.matrix = ComplexMatrix::Zero(c.r * c.m, c.s * c.n);
  for (Index i = 0; i < c.m; ++i)
    for (Index j = 0; j < c.n; ++j) c.matrix.block(i * c.r, j * c.s, c.r, c.s) = t.unit_image(i, j);
  return c;
}

struct PositivityResult {
  bool completely_positive = false;
  double min_eigenvalue = 0.0;
  double hermitian_residual = 0.0;
};

/// Complete positivity via the Choi matrix: CP iff Choi is Hermitian and min eigenvalue >= -tol.
inline PositivityResult is_completely_positive(const MatrixMap& t, double tol = kDefaultTol) {
  if (!t.domain().square() || !t.codomain().square()) {
    throw DimensionError("is_completely_positive: domain and codomain must be square");
  }
  const ChoiMatrix c = choi_matrix(t);
  PositivityResult res;
  res.hermitian_residual = (c.matrix - c.matrix.adjoint()).norm();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (c.matrix + c.matrix.adjoint()), Eigen::EigenvaluesOnly);
  res.min_eigenvalue = es.eigenvalues()(0);
  const double scale = std::max(1.0, c.matrix.norm());
  res.completely_positive = res.hermitian_residual <= tol * scale && res.min_eigenvalue >= -tol;
  return res;
}

enum class CcVerdict { certified_yes, certified_no, undecided };

inline const char* to_string(CcVerdict v) {
  switch (v) {
    case CcVerdict::certified_yes:
      return "certified_yes";
    case CcVerdict::certified_no:
      return "certified_no";
    case CcVerdict::undecided:
      return "undecided";
  }
  return "undecided";
}

struct CcOptions {
  double tol = kDefaultTol;
  int max_iters = 5000;
  double residual = 1e-7;
  Index level = 0;  ///< falsification level; 0 means min(r, s)
  Index trials = 6;
  std::uint64_t seed = 20240607;
  bool run_falsifier = true;
};

/**
 * Certificate for complete contractivity.
 *
 * method "haagerup": T(x) = sum_k A_k x B_k with the recorded factors, and
 * ||T||_cb <= sqrt(||sum A A*|| ||sum B* B||) + (reconstruction error).
 * method "block_positivity": the block map [[phi1, c T], [c T^dagger, phi2]]
 * with c = 1 + eta has a PSD Choi matrix, giving
 * ||T||_cb <= sqrt(||phi1(1)|| ||phi2(1)||) / c + (fit error).
 * method "falsifier": a witness X with ||T_L(X)|| > ||X||.
 */
struct CcCertificate {
  CcVerdict verdict = CcVerdict::undecided;
  std::string method;
  double bound = std::numeric_limits<double>::infinity();
  std::vector<ComplexMatrix> left_factors, right_factors;
  std::optional<MatrixMap> phi1, phi2;
  /// The map whose block matrix with phi1, phi2 is positive; the bound adds
  /// sum_ij ||T(E_ij) - fitted(E_ij)|| to cover the difference.
  std::optional<MatrixMap> fitted;
  double eta = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::optional<ComplexMatrix> witness;
  double witness_ratio = 0.0;
  Index level = 0;
};

namespace detail {

/// Sum over matrix units of the operator-norm error of a Haagerup factorization.
inline double haagerup_fit_error(const MatrixMap& t, const std::vector<ComplexMatrix>& a,
                                 const std::vector<ComplexMatrix>& b) {
  const Index m = t.domain().rows(), n = t.domain().cols();
  double err = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      ComplexMatrix y = t.unit_image(i, j);
      for (std::size_t k = 0; k < a.size(); ++k) y -= a[k].col(i) * b[k].row(j);
      err += op_norm(y);
    }
  return err;
}

inline double haagerup_bound(const std::vector<ComplexMatrix>& a, const std::vector<ComplexMatrix>& b, Index r,
                             Index s) {
  ComplexMatrix aa = ComplexMatrix::Zero(r, r), bb = ComplexMatrix::Zero(s, s);
  for (const auto& x : a) aa += x * x.adjoint();
  for (const auto& y : b) bb += y.adjoint() * y;
  return std::sqrt(op_norm(aa) * op_norm(bb));
}

/// Factors T(x) = sum_k A_k x B_k: Kraus operators when the Choi matrix is PSD,
/// otherwise the singular value decomposition of the realigned action.
inline void haagerup_factors(const MatrixMap& t, double tol, std::vector<ComplexMatrix>& a,
                             std::vector<ComplexMatrix>& b) {
  const Index m = t.domain().rows(), n = t.domain().cols();
  const Index r = t.codomain().rows(), s = t.codomain().cols();
  a.clear();
  b.clear();
  if (m == n && r == s) {
    const PositivityResult pos = is_completely_positive(t, tol);
    if (pos.completely_positive) {
      const ChoiMatrix c = choi_matrix(t);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (c.matrix + c.matrix.adjoint()));
      const double top = es.eigenvalues().cwiseAbs().maxCoeff();
      for (Index e = 0; e < es.eigenvalues().size(); ++e) {
        const double lam = es.eigenvalues()(e);
        if (lam <= tol * top) continue;
        ComplexMatrix k(r, m);
        for (Index i = 0; i < m; ++i) k.col(i) = std::sqrt(lam) * es.eigenvectors().col(e).segment(i * r, r);
        a.push_back(k);
        b.push_back(k.adjoint());
      }
      return;
    }
  }
  // Realigned matrix R[(a, i), (j, b)] = T(E_ij)(a, b).
  ComplexMatrix re(r * m, n * s);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index x = 0; x < r; ++x)
        for (Index y = 0; y < s; ++y) re(x * m + i, j * s + y) = t.unit_image(i, j)(x, y);
  Eigen::JacobiSVD<ComplexMatrix> svd(re, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  for (Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= tol * sv(0) || sv(k) == 0.0) continue;
    ComplexMatrix ak(r, m), bk(n, s);
    for (Index x = 0; x < r; ++x)
      for (Index i = 0; i < m; ++i) ak(x, i) = std::sqrt(sv(k)) * svd.matrixU()(x * m + i, k);
    for (Index j = 0; j < n; ++j)
      for (Index y = 0; y < s; ++y) bk(j, y) = std::sqrt(sv(k)) * std::conj(svd.matrixV()(j * s + y, k));
    a.push_back(ak);
    b.push_back(bk);
  }
}

/**
 * Dykstra's alternating projections between the PSD cone and the affine set
 * of (m r + n s)-square Hermitian matrices whose off-diagonal block is the
 * generalized Choi matrix of c*T and whose diagonal blocks are Choi matrices
 * of unital maps.  Stops once a PSD iterate certifies a bound <= target, or
 * when the projections meet within `residual`.
 */
inline bool block_positivity(const MatrixMap& t, double c, int max_iters, double residual, double target,
                             CcCertificate& cert) {
  const Index m = t.domain().rows(), n = t.domain().cols();
  const Index r = t.codomain().rows(), s = t.codomain().cols();
  const Index top = m * r, dim = m * r + n * s;
  ComplexMatrix target_block(top, n * s);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) target_block.block(i * r, j * s, r, s) = c * t.unit_image(i, j);

  auto project_affine = [&](ComplexMatrix& x) {
    x.topRightCorner(top, n * s) = target_block;
    x.bottomLeftCorner(n * s, top) = target_block.adjoint();
    ComplexMatrix excess = -ComplexMatrix::Identity(r, r);
    for (Index i = 0; i < m; ++i) excess += x.block(i * r, i * r, r, r);
    for (Index i = 0; i < m; ++i) x.block(i * r, i * r, r, r) -= excess / double(m);
    ComplexMatrix excess2 = -ComplexMatrix::Identity(s, s);
    for (Index j = 0; j < n; ++j) excess2 += x.block(top + j * s, top + j * s, s, s);
    for (Index j = 0; j < n; ++j) x.block(top + j * s, top + j * s, s, s) -= excess2 / double(n);
  };
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es;
  auto project_psd = [&](const ComplexMatrix& x) {
    es.compute(0.5 * (x + x.adjoint()));
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return ComplexMatrix(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint());
  };
  // Any PSD z gives ||T||_cb <= sqrt(||sum_i z_ii|| ||sum_j z'_jj||) / c + (fit error).
  auto bound_of = [&](const ComplexMatrix& z) {
    ComplexMatrix one1 = ComplexMatrix::Zero(r, r), one2 = ComplexMatrix::Zero(s, s);
    for (Index i = 0; i < m; ++i) one1 += z.block(i * r, i * r, r, r);
    for (Index j = 0; j < n; ++j) one2 += z.block(top + j * s, top + j * s, s, s);
    double fit = 0.0;
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) fit += op_norm(z.block(i * r, top + j * s, r, s) / c - t.unit_image(i, j));
    return std::sqrt(op_norm(one1) * op_norm(one2)) / c + fit;
  };

  ComplexMatrix x = ComplexMatrix::Zero(dim, dim);
  x.topLeftCorner(top, top) = ComplexMatrix::Identity(top, top) / double(m);
  x.bottomRightCorner(n * s, n * s) = ComplexMatrix::Identity(n * s, n * s) / double(n);
  ComplexMatrix pcorr = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix z = x;
  double gap = std::numeric_limits<double>::infinity();
  double bound = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iters; ++it) {
    ComplexMatrix y = x;
    project_affine(y);
    z = project_psd(y + pcorr);
    pcorr = y + pcorr - z;
    gap = (y - z).norm();
    x = z;
    if (gap <= residual || it % 25 == 24) {
      bound = bound_of(z);
      if (bound <= target || gap <= residual) break;
    }
  }
  cert.iterations += std::min(it + 1, max_iters);
  cert.residual = gap;
  if (bound > target) return false;

  std::vector<ComplexMatrix> a1, a2;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) a1.push_back(z.block(i * r, j * r, r, r));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a2.push_back(z.block(top + i * s, top + j * s, s, s));
  cert.bound = bound;
  cert.phi1 = MatrixMap(Shape(m, m), Shape(r, r), a1);
  cert.phi2 = MatrixMap(Shape(n, n), Shape(s, s), a2);
  cert.eta = c - 1.0;
  std::vector<ComplexMatrix> fit_action;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) fit_action.push_back(z.block(i * r, top + j * s, r, s) / c);
  cert.fitted = MatrixMap(t.domain(), t.codomain(), std::move(fit_action));
  return true;
}

}  // namespace detail

/**
 * Three-valued complete contractivity test.
 *
 * certified_no: the falsifier found ||T_L(X)|| > ||X|| + tol at level
 * L = min(r, s) (or options.level).  certified_yes: an explicit
 * factorization or a block-positivity certificate bounds ||T||_cb by 1 + tol.
 * undecided otherwise.
 */
inline CcCertificate is_completely_contractive(const MatrixMap& t, const CcOptions& opt = {}) {
  CcCertificate cert;
  const Index r = t.codomain().rows(), s = t.codomain().cols();
  cert.level = opt.level > 0 ? opt.level : std::min(r, s);

  // Lower estimate of ||T||_cb; it places the scaled targets inside the feasible region.
  double estimate = 1.0;
  if (opt.run_falsifier) {
    const FalsifierResult f1 = amplified_isometry_falsifier(t, 1, opt.trials, opt.seed);
    FalsifierResult best = f1;
    if (!f1.expansion_found(opt.tol) && cert.level > 1) {
      best = amplified_isometry_falsifier(t, cert.level, opt.trials, opt.seed + 1, {*f1.expansion.witness});
    }
    if (best.expansion_found(opt.tol)) {
      cert.verdict = CcVerdict::certified_no;
      cert.method = "falsifier";
      cert.witness = best.expansion.witness;
      cert.witness_ratio = best.expansion.lower;
      cert.level = best.level;
      cert.bound = best.expansion.lower;
      return cert;
    }
    estimate = std::max(best.expansion.lower, 1e-3);
  }

  std::vector<ComplexMatrix> a, b;
  detail::haagerup_factors(t, opt.tol, a, b);
  const double hb = detail::haagerup_bound(a, b, r, s) + detail::haagerup_fit_error(t, a, b);
  if (hb <= 1.0 + opt.tol) {
    cert.verdict = CcVerdict::certified_yes;
    cert.method = "haagerup";
    cert.bound = hb;
    // phi1(x) = sum A x A*, phi2(y) = sum B* y B make the block map CP.
    const Index m = t.domain().rows(), n = t.domain().cols();
    cert.phi1 = MatrixMap::from_function(Shape(m, m), Shape(r, r), [&](const ComplexMatrix& x) {
      ComplexMatrix y = ComplexMatrix::Zero(r, r);
      for (const auto& ak : a) y += ak * x * ak.adjoint();
      return y;
    });
    cert.phi2 = MatrixMap::from_function(Shape(n, n), Shape(s, s), [&](const ComplexMatrix& x) {
      ComplexMatrix y = ComplexMatrix::Zero(s, s);
      for (const auto& bk : b) y += bk.adjoint() * x * bk;
      return y;
    });
    cert.fitted = MatrixMap::from_function(t.domain(), t.codomain(), [&](const ComplexMatrix& x) {
      ComplexMatrix y = ComplexMatrix::Zero(r, s);
      for (std::size_t k = 0; k < a.size(); ++k) y += a[k] * x * b[k];
      return y;
    });
    cert.left_factors = std::move(a);
    cert.right_factors = std::move(b);
    return cert;
  }

  // Scaled targets leave room for the fit error of an inexact iterate.
  const double room = std::max(0.0, 1.0 / estimate - 1.0);
  const double etas[] = {std::max(0.5 * room, 0.005), 0.125 * room, 0.0};
  const int budget = std::max(1, opt.max_iters / 3);
  for (const double eta : etas) {
    const int iters = eta == 0.0 ? std::max(1, opt.max_iters - cert.iterations) : budget;
    if (detail::block_positivity(t, 1.0 + eta, iters, opt.residual, 1.0 + opt.tol, cert)) {
      cert.verdict = CcVerdict::certified_yes;
      cert.method = "block_positivity";
      return cert;
    }
    if (cert.iterations >= opt.max_iters) break;
  }
  cert.verdict = CcVerdict::undecided;
  return cert;
}

}  // namespace isolab

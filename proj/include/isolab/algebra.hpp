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
 * @file algebra.hpp
 * @brief Subspaces of matrix spaces: triple and C*-closures, support
 * projections, ideals and quotient compressions.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linmap.hpp"
#include "numeric.hpp"
#include "report.hpp"

namespace isolab {

/**
 * A linear subspace of M_{r,s} with a basis orthonormal in the trace inner
 * product <x, y> = tr(x* y).
 *
 * Spanning sets are orthonormalized by Gram-Schmidt in insertion order (with
 * one re-orthogonalization pass); an element is dropped as dependent when its
 * residual is at most tol times its norm.
 */
class MatrixSubspace {
 public:
  explicit MatrixSubspace(Shape ambient) : ambient_(ambient), coords_(ambient.size(), 0) {}

  MatrixSubspace(Shape ambient, const std::vector<ComplexMatrix>& spanning, double tol = kDefaultTol)
      : MatrixSubspace(ambient) {
    for (const auto& x : spanning) {
      if (!ambient_.matches(x)) throw DimensionError("MatrixSubspace: element shape differs from ambient " + ambient_.str());
      insert(x, tol);
    }
  }

  static MatrixSubspace full(Shape ambient) {
    std::vector<ComplexMatrix> units;
    for (Index i = 0; i < ambient.rows(); ++i)
      for (Index j = 0; j < ambient.cols(); ++j) units.push_back(matrix_unit(ambient, i, j));
    return MatrixSubspace(ambient, units);
  }

  /// Subspace whose basis coordinates are the (orthonormal) columns of q.
  static MatrixSubspace from_coordinates(Shape ambient, const ComplexMatrix& q, double tol = kDefaultTol) {
    std::vector<ComplexMatrix> span;
    for (Index c = 0; c < q.cols(); ++c) span.push_back(from_coords(q.col(c), ambient));
    return MatrixSubspace(ambient, span, tol);
  }

  const Shape& ambient() const { return ambient_; }
  Index dim() const { return static_cast<Index>(basis_.size()); }
  bool empty() const { return basis_.empty(); }
  const std::vector<ComplexMatrix>& basis() const { return basis_; }

  /// Columns are coords() of the basis elements.
  const ComplexMatrix& coordinate_basis() const { return coords_; }

  /// Adds x to the spanning set; returns true when the dimension grew.
  ///
  /// x counts as dependent when its residual is at most tol * scale; scale
  /// defaults to the norm of x and should be the product of the factor norms
  /// when x is a computed product (so rounding noise is not taken as new).
  bool insert(const ComplexMatrix& x, double tol = kDefaultTol, double scale = -1.0) {
    ComplexVector v = coords(x);
    const double norm = scale >= 0.0 ? scale : v.norm();
    if (v.norm() == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) {
      if (coords_.cols() > 0) v -= coords_ * (coords_.adjoint() * v);
    }
    const double res = v.norm();
    if (res <= tol * norm) return false;
    v /= res;
    coords_.conservativeResize(Eigen::NoChange, coords_.cols() + 1);
    coords_.col(coords_.cols() - 1) = v;
    basis_.push_back(from_coords(v, ambient_));
    return true;
  }

  ComplexVector coefficients(const ComplexMatrix& x) const {
    check_shape(x);
    return coords_.adjoint() * coords(x);
  }

  ComplexMatrix project(const ComplexMatrix& x) const {
    check_shape(x);
    if (empty()) return ComplexMatrix::Zero(ambient_.rows(), ambient_.cols());
    return from_coords(coords_ * (coords_.adjoint() * coords(x)), ambient_);
  }

  /// Frobenius distance from x to the subspace.
  double distance(const ComplexMatrix& x) const { return (x - project(x)).norm(); }

  bool contains(const ComplexMatrix& x, double tol = kDefaultTol) const { return distance(x) <= tol * x.norm(); }

  bool contains(const MatrixSubspace& other, double tol = kDefaultTol) const {
    for (const auto& b : other.basis())
      if (!contains(b, tol)) return false;
    return true;
  }

  /// The subspace {x* : x in this}.
  MatrixSubspace adjoint(double tol = kDefaultTol) const {
    std::vector<ComplexMatrix> span;
    for (const auto& b : basis_) span.push_back(b.adjoint());
    return MatrixSubspace(Shape(ambient_.cols(), ambient_.rows()), span, tol);
  }

 private:
  void check_shape(const ComplexMatrix& x) const {
    if (!ambient_.matches(x)) throw DimensionError("MatrixSubspace: element shape differs from ambient " + ambient_.str());
  }

  Shape ambient_;
  std::vector<ComplexMatrix> basis_;
  ComplexMatrix coords_;
};

inline MatrixSubspace subspace_sum(const MatrixSubspace& a, const MatrixSubspace& b, double tol = kDefaultTol) {
  if (!(a.ambient() == b.ambient())) throw DimensionError("subspace_sum: ambient mismatch");
  std::vector<ComplexMatrix> span = a.basis();
  span.insert(span.end(), b.basis().begin(), b.basis().end());
  return MatrixSubspace(a.ambient(), span, tol);
}

/// Intersection, computed from the null space of [Qa, -Qb].
inline MatrixSubspace subspace_intersection(const MatrixSubspace& a, const MatrixSubspace& b, double tol = kDefaultTol) {
  if (!(a.ambient() == b.ambient())) throw DimensionError("subspace_intersection: ambient mismatch");
  if (a.empty() || b.empty()) return MatrixSubspace(a.ambient());
  ComplexMatrix stacked(a.ambient().size(), a.dim() + b.dim());
  stacked << a.coordinate_basis(), -b.coordinate_basis();
  const ComplexMatrix ns = null_space(stacked, tol);
  std::vector<ComplexMatrix> span;
  for (Index c = 0; c < ns.cols(); ++c) {
    span.push_back(from_coords(a.coordinate_basis() * ns.col(c).head(a.dim()), a.ambient()));
  }
  return MatrixSubspace(a.ambient(), span, tol);
}

/// A Hermitian idempotent of M_n.
class Projection {
 public:
  explicit Projection(ComplexMatrix matrix, double tol = kDefaultTol) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionError("Projection: matrix must be square");
    const double herm = (matrix_ - matrix_.adjoint()).norm();
    const double idem = (matrix_ * matrix_ - matrix_).norm();
    const double scale = std::max(1.0, matrix_.norm());
    if (herm > tol * scale || idem > tol * scale) {
      throw StructureError("Projection: matrix is not a Hermitian idempotent (residuals " + std::to_string(herm) +
                           ", " + std::to_string(idem) + ")");
    }
  }

  static Projection zero(Index n) { return Projection(ComplexMatrix::Zero(n, n)); }

  const ComplexMatrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }
  Index rank() const { return static_cast<Index>(std::lround(matrix_.trace().real())); }
  bool is_zero() const { return rank() == 0; }

  /// 1 - p.
  ComplexMatrix complement() const { return ComplexMatrix::Identity(dim(), dim()) - matrix_; }

 private:
  ComplexMatrix matrix_;
};

namespace detail {

/// Orthonormal (Frobenius) basis of {c : y c = c y for all y in ys}.
inline std::vector<ComplexMatrix> commutant_of(const std::vector<ComplexMatrix>& ys, Index n, double tol) {
  const Index n2 = n * n;
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix stack(n2 * static_cast<Index>(ys.size()), n2);
  // Row-major coordinates: vec(y c) = (y (x) I) vec(c), vec(c y) = (I (x) y^T) vec(c).
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const ComplexMatrix& y = ys[k];
    ComplexMatrix a = ComplexMatrix::Zero(n2, n2);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        a.block(i * n, j * n, n, n) += y(i, j) * id;
        a.block(i * n, i * n, n, n) -= (i == j ? 1.0 : 0.0) * ComplexMatrix(y.transpose());
      }
    stack.middleRows(static_cast<Index>(k) * n2, n2) = a;
  }
  // Absolute cut: a set of near-scalars gives a stack of pure rounding noise,
  // and a cut relative to the largest singular value would keep it.
  double scale = 0.0;
  for (const auto& y : ys) scale = std::max(scale, y.norm());
  Eigen::JacobiSVD<ComplexMatrix> svd(stack, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * scale) ++rank;
  const ComplexMatrix ker = svd.matrixV().rightCols(n2 - rank);
  std::vector<ComplexMatrix> out;
  for (Index c = 0; c < ker.cols(); ++c) out.push_back(from_coords(ker.col(c), Shape(n, n)));
  return out;
}

/**
 * Commutant of a *-closed set of n x n matrices.  Starts from a few random
 * elements of the span (a generic pair generates the algebra) and adds any
 * member that fails to commute with the candidate.
 */
inline std::vector<ComplexMatrix> commutant(const std::vector<ComplexMatrix>& set, Index n, double tol) {
  if (set.empty()) {
    std::vector<ComplexMatrix> all;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) all.push_back(matrix_unit(Shape(n, n), i, j));
    return all;
  }
  std::mt19937_64 rng(0x5eedc0de);
  std::normal_distribution<double> nd;
  std::vector<ComplexMatrix> ys;
  double scale = 0.0;
  for (const auto& x : set) scale = std::max(scale, x.norm());
  for (int k = 0; k < 2; ++k) {
    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    for (const auto& x : set) {
      const double re = nd(rng);
      const double im = nd(rng);
      y += Complex(re, im) * x;
    }
    ys.push_back(y);
    ys.push_back(y.adjoint());
  }
  for (;;) {
    const std::vector<ComplexMatrix> c = commutant_of(ys, n, tol);
    bool grown = false;
    for (const auto& x : set) {
      double worst = 0.0;
      for (const auto& e : c) worst = std::max(worst, (x * e - e * x).norm());
      if (worst > 1e3 * tol * std::max(scale, x.norm())) {
        ys.push_back(x);
        grown = true;
        break;
      }
    }
    if (!grown) return c;
  }
}

/**
 * The *-algebra generated by a *-closed set: e S'' e with S'' the bicommutant
 * (the unital algebra generated) and e the support unit of the set.
 */
inline MatrixSubspace generated_algebra(const std::vector<ComplexMatrix>& set, Index n, double tol) {
  const Shape amb(n, n);
  MatrixSubspace out(amb);
  if (set.empty()) return out;
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (const auto& x : set) h += x * x.adjoint() + x.adjoint() * x;
  const ComplexMatrix e = spectral_support(0.5 * (h + h.adjoint()), tol);
  const std::vector<ComplexMatrix> bicomm = commutant(commutant(set, n, tol), n, tol);
  for (const auto& b : bicomm) out.insert(e * b * e, tol, 1.0);
  return out;
}

}  // namespace detail

/// Smallest subspace containing seed and closed under (x, y, z) |-> x y* z.
///
/// Computed as Z = A X with A the *-algebra generated by X X*: every odd word
/// x1 x2* x3 ... lies in A X, and A X is closed under the triple product.
inline MatrixSubspace triple_closure(const MatrixSubspace& seed, double tol = kDefaultTol) {
  if (seed.empty()) throw ArgumentError("triple_closure: seed must be nonempty");
  const Index r = seed.ambient().rows();
  std::vector<ComplexMatrix> gens;
  for (const auto& x : seed.basis())
    for (const auto& y : seed.basis()) gens.push_back(x * y.adjoint());
  const MatrixSubspace alg = detail::generated_algebra(gens, r, tol);
  MatrixSubspace z(seed.ambient());
  for (const auto& x : seed.basis()) z.insert(x, tol, 1.0);
  for (const auto& a : alg.basis())
    for (const auto& x : seed.basis()) z.insert(a * x, tol, 1.0);
  return z;
}

/// Smallest *-closed, product-closed subspace of M_n containing seed.
inline MatrixSubspace cstar_closure(const MatrixSubspace& seed, double tol = kDefaultTol) {
  if (!seed.ambient().square()) throw DimensionError("cstar_closure: ambient must be square");
  std::vector<ComplexMatrix> gens;
  for (const auto& b : seed.basis()) {
    gens.push_back(b);
    gens.push_back(b.adjoint());
  }
  return detail::generated_algebra(gens, seed.ambient().rows(), tol);
}

/// True when Z Z* Z lies in Z.
inline bool is_triple_system(const MatrixSubspace& z, double tol = kDefaultTol) {
  if (z.empty()) return true;
  return triple_closure(z, tol).dim() == z.dim();
}

/// True when the subspace is closed under adjoints and products.
inline bool is_cstar_algebra(const MatrixSubspace& a, double tol = kDefaultTol) {
  if (!a.ambient().square()) return false;
  for (const auto& x : a.basis())
    if (!a.contains(ComplexMatrix(x.adjoint()), tol * 10)) return false;
  for (const auto& x : a.basis())
    for (const auto& y : a.basis()) {
      const ComplexMatrix xy = x * y;
      if (a.distance(xy) > tol * 10 * std::max(1.0, xy.norm())) return false;
    }
  return true;
}

/// The left and right C*-algebras span(Z Z*) and span(Z* Z) of a triple system.
inline std::pair<MatrixSubspace, MatrixSubspace> left_right_cstar(const MatrixSubspace& z, double tol = kDefaultTol) {
  if (!is_triple_system(z, tol)) throw StructureError("left_right_cstar: subspace is not closed under x y* z");
  const Index r = z.ambient().rows(), s = z.ambient().cols();
  MatrixSubspace left(Shape(r, r)), right(Shape(s, s));
  for (const auto& x : z.basis())
    for (const auto& y : z.basis()) {
      left.insert(x * y.adjoint(), tol, 1.0);
      right.insert(x.adjoint() * y, tol, 1.0);
    }
  return {left, right};
}

/**
 * Unit of a finite-dimensional C*-subalgebra: the spectral support of
 * sum_i b_i b_i* over an orthonormal basis.  The zero algebra gives p = 0.
 */
inline Projection support_projection(const MatrixSubspace& ideal, double tol = kDefaultTol) {
  if (!ideal.ambient().square()) throw DimensionError("support_projection: ambient must be square");
  const Index n = ideal.ambient().rows();
  if (ideal.empty()) return Projection::zero(n);
  if (!is_cstar_algebra(ideal, tol)) throw StructureError("support_projection: subspace is not a *-algebra");
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (const auto& b : ideal.basis()) h += b * b.adjoint();
  return Projection(spectral_support(0.5 * (h + h.adjoint()), tol), 1e-8);
}

/// The concrete quotient of M_n by J + K.
struct QuotientCompression {
  Projection e;  ///< J = M e
  Projection f;  ///< K = f M
  MatrixMap compression;  ///< x |-> (1 - f) x (1 - e)
  Index kernel_dim = 0;
  Index ideal_sum_dim = 0;
};

/**
 * For a left ideal J and right ideal K of M_n, returns e, f with J = M e,
 * K = f M and the compression x |-> (1-f) x (1-e), whose kernel is J + K.
 */
inline QuotientCompression quotient_compression(Shape b, const MatrixSubspace& j, const MatrixSubspace& k,
                                                double tol = kDefaultTol) {
  if (!b.square()) throw DimensionError("quotient_compression: ambient algebra must be square");
  if (!(j.ambient() == b) || !(k.ambient() == b)) throw DimensionError("quotient_compression: ambient mismatch");
  const Index n = b.rows();
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) {
      const ComplexMatrix unit = matrix_unit(b, r, c);
      for (const auto& x : j.basis())
        if (j.distance(unit * x) > tol * 10) throw StructureError("quotient_compression: J is not a left ideal");
      for (const auto& x : k.basis())
        if (k.distance(x * unit) > tol * 10) throw StructureError("quotient_compression: K is not a right ideal");
    }
  ComplexMatrix he = ComplexMatrix::Zero(n, n), hf = ComplexMatrix::Zero(n, n);
  for (const auto& x : j.basis()) he += x.adjoint() * x;
  for (const auto& x : k.basis()) hf += x * x.adjoint();
  Projection e(spectral_support(0.5 * (he + he.adjoint()), tol), 1e-8);
  Projection f(spectral_support(0.5 * (hf + hf.adjoint()), tol), 1e-8);
  const ComplexMatrix left = f.complement(), right = e.complement();
  MatrixMap comp = MatrixMap::from_function(b, b, [&](const ComplexMatrix& x) { return ComplexMatrix(left * x * right); });
  const Index kernel_dim = b.size() - numerical_rank(comp.coordinate_matrix(), tol);
  const MatrixSubspace both = subspace_intersection(j, k, tol);
  const Index sum_dim = j.dim() + k.dim() - both.dim();
  return QuotientCompression{std::move(e), std::move(f), std::move(comp), kernel_dim, sum_dim};
}

/**
 * For a C*-subalgebra A of M_n and a two-sided ideal I of A, checks that
 * J = M I satisfies J cap A = I and that a |-> (1-p) a (1-p), p the support
 * of I, is multiplicative on A with kernel I.
 */
inline CheckReport verify_ideal_extension(Shape b, const MatrixSubspace& a, const MatrixSubspace& ideal,
                                  double tol = kDefaultTol) {
  CheckReport rep;
  const Index n = b.rows();
  MatrixSubspace j(b);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      for (const auto& x : ideal.basis()) j.insert(matrix_unit(b, r, c) * x, tol, 1.0);
  const MatrixSubspace meet = subspace_intersection(j, a, tol);
  rep.add("J_cap_A_dimension", std::abs(static_cast<double>(meet.dim() - ideal.dim())), 0.0);
  double member = 0.0;
  for (const auto& x : ideal.basis()) member = std::max(member, meet.distance(x));
  for (const auto& x : meet.basis()) member = std::max(member, ideal.distance(x));
  rep.add("J_cap_A_equals_I", member, tol * 10);

  const Projection p = support_projection(ideal, tol);
  const ComplexMatrix c = p.complement();
  auto comp = [&](const ComplexMatrix& x) { return ComplexMatrix(c * x * c); };
  double mult = 0.0;
  for (const auto& x : a.basis())
    for (const auto& y : a.basis()) mult = std::max(mult, (comp(x * y) - comp(x) * comp(y)).norm());
  rep.add("compression_multiplicative", mult, tol * 10);
  double kills = 0.0;
  for (const auto& x : ideal.basis()) kills = std::max(kills, comp(x).norm());
  rep.add("compression_kills_I", kills, tol * 10);
  MatrixSubspace image(b);
  for (const auto& x : a.basis()) image.insert(comp(x), tol, 1.0);
  rep.add("compression_kernel_is_I", std::abs(static_cast<double>(a.dim() - image.dim() - ideal.dim())), 0.0);
  return rep;
}

}  // namespace isolab

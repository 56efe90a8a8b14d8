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
 * @file linmap.hpp
 * @brief Linear maps between rectangular complex matrix spaces.
 *
 * A map T : M_{m,n} -> M_{r,s} is stored by its action on the matrix units,
 * i.e. the list T(E_00), T(E_01), ..., T(E_{m-1,n-1}) in row-major order of
 * the unit index.  Amplification id_k (x) T and the adjoint map
 * x |-> T(x*)* are computed directly on this list.
 */

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace isolab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Default tolerance for every numerical decision in the library.
inline constexpr double kDefaultTol = 1e-9;

/// Dimensions (rows, cols) of a matrix space M_{rows,cols}; both at least 1.
class Shape {
 public:
  Shape(Index rows, Index cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) {
      throw ArgumentError("Shape: rows and cols must be positive, got (" +
                          std::to_string(rows) + ", " + std::to_string(cols) + ")");
    }
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return rows_ * cols_; }
  bool square() const { return rows_ == cols_; }

  bool matches(const ComplexMatrix& x) const { return x.rows() == rows_ && x.cols() == cols_; }

  friend bool operator==(const Shape&, const Shape&) = default;

  std::string str() const { return "(" + std::to_string(rows_) + "," + std::to_string(cols_) + ")"; }

 private:
  Index rows_;
  Index cols_;
};

/// Matrix unit E_ij of the given shape.
inline ComplexMatrix matrix_unit(const Shape& shape, Index i, Index j) {
  ComplexMatrix e = ComplexMatrix::Zero(shape.rows(), shape.cols());
  e(i, j) = 1.0;
  return e;
}

/// Row-major coordinate vector of x: entry i*cols + j holds x(i, j).
inline ComplexVector coords(const ComplexMatrix& x) {
  ComplexVector v(x.size());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  return v;
}

/// Inverse of coords().
inline ComplexMatrix from_coords(const Eigen::Ref<const ComplexVector>& v, const Shape& shape) {
  if (v.size() != shape.size()) throw DimensionError("from_coords: length does not match shape");
  ComplexMatrix x(shape.rows(), shape.cols());
  for (Index i = 0; i < shape.rows(); ++i)
    for (Index j = 0; j < shape.cols(); ++j) x(i, j) = v(i * shape.cols() + j);
  return x;
}

/**
 * A linear map T : M_{m,n} -> M_{r,s} given by the images of the matrix units.
 *
 * Immutable after construction.
 */
class MatrixMap {
 public:
  MatrixMap(Shape domain, Shape codomain, std::vector<ComplexMatrix> action)
      : domain_(domain), codomain_(codomain), action_(std::move(action)) {
    if (static_cast<Index>(action_.size()) != domain_.size()) {
      throw DimensionError("MatrixMap: expected " + std::to_string(domain_.size()) +
                           " images, got " + std::to_string(action_.size()));
    }
    for (const auto& a : action_) {
      if (!codomain_.matches(a)) throw DimensionError("MatrixMap: image shape differs from codomain " + codomain_.str());
    }
  }

  /// Builds the map from a function, evaluating it on the matrix units.
  static MatrixMap from_function(Shape domain, Shape codomain,
                                 const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
    std::vector<ComplexMatrix> action;
    action.reserve(static_cast<std::size_t>(domain.size()));
    for (Index i = 0; i < domain.rows(); ++i)
      for (Index j = 0; j < domain.cols(); ++j) action.push_back(f(matrix_unit(domain, i, j)));
    return MatrixMap(domain, codomain, std::move(action));
  }

  static MatrixMap identity(Shape shape) {
    return from_function(shape, shape, [](const ComplexMatrix& x) { return x; });
  }

  static MatrixMap zero(Shape domain, Shape codomain) {
    return MatrixMap(domain, codomain,
                     std::vector<ComplexMatrix>(static_cast<std::size_t>(domain.size()),
                                                ComplexMatrix::Zero(codomain.rows(), codomain.cols())));
  }

  const Shape& domain() const { return domain_; }
  const Shape& codomain() const { return codomain_; }
  const std::vector<ComplexMatrix>& action() const { return action_; }

  /// T(E_ij).
  const ComplexMatrix& unit_image(Index i, Index j) const {
    return action_[static_cast<std::size_t>(i * domain_.cols() + j)];
  }

  ComplexMatrix apply(const ComplexMatrix& x) const {
    if (!domain_.matches(x)) {
      throw DimensionError("apply: argument is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                           ", map domain is " + domain_.str());
    }
    ComplexMatrix y = ComplexMatrix::Zero(codomain_.rows(), codomain_.cols());
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < x.cols(); ++j)
        if (x(i, j) != Complex(0.0)) y += x(i, j) * unit_image(i, j);
    return y;
  }

  ComplexMatrix operator()(const ComplexMatrix& x) const { return apply(x); }

  /// The (r*s) x (m*n) matrix sending coords(x) to coords(T(x)).
  ComplexMatrix coordinate_matrix() const {
    ComplexMatrix m(codomain_.size(), domain_.size());
    for (std::size_t k = 0; k < action_.size(); ++k) m.col(static_cast<Index>(k)) = coords(action_[k]);
    return m;
  }

  /// Frobenius norm of the action tensor.
  double action_norm() const {
    double s = 0.0;
    for (const auto& a : action_) s += a.squaredNorm();
    return std::sqrt(s);
  }

  MatrixMap operator+(const MatrixMap& other) const {
    check_same_shapes(other);
    std::vector<ComplexMatrix> a = action_;
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += other.action_[k];
    return MatrixMap(domain_, codomain_, std::move(a));
  }

  MatrixMap operator-(const MatrixMap& other) const { return *this + other * Complex(-1.0); }

  MatrixMap operator*(Complex c) const {
    std::vector<ComplexMatrix> a = action_;
    for (auto& m : a) m *= c;
    return MatrixMap(domain_, codomain_, std::move(a));
  }

  /// Post-composition x |-> L T(x) R.
  MatrixMap sandwich(const ComplexMatrix& left, const ComplexMatrix& right) const {
    if (left.cols() != codomain_.rows() || right.rows() != codomain_.cols()) {
      throw DimensionError("sandwich: factors do not fit codomain " + codomain_.str());
    }
    std::vector<ComplexMatrix> a;
    a.reserve(action_.size());
    for (const auto& m : action_) a.push_back(left * m * right);
    return MatrixMap(domain_, Shape(left.rows(), right.cols()), std::move(a));
  }

  /// Pre-composition x |-> T(L x R).
  MatrixMap precompose(const ComplexMatrix& left, const ComplexMatrix& right) const {
    if (left.rows() != domain_.rows() || right.cols() != domain_.cols()) {
      throw DimensionError("precompose: factors do not fit domain " + domain_.str());
    }
    const Shape inner(left.cols(), right.rows());
    return from_function(inner, codomain_, [&](const ComplexMatrix& x) { return apply(left * x * right); });
  }

 private:
  void check_same_shapes(const MatrixMap& other) const {
    if (!(domain_ == other.domain_) || !(codomain_ == other.codomain_)) {
      throw DimensionError("MatrixMap: shape mismatch in arithmetic");
    }
  }

  Shape domain_;
  Shape codomain_;
  std::vector<ComplexMatrix> action_;
};

inline MatrixMap operator*(Complex c, const MatrixMap& t) { return t * c; }

/// x |-> x^T on M_n.
inline MatrixMap transpose_map(Index n) {
  const Shape sh(n, n);
  return MatrixMap::from_function(sh, sh, [](const ComplexMatrix& x) { return ComplexMatrix(x.transpose()); });
}

/// Evaluates id_k (x) T on a (k*m) x (k*n) block matrix without building the amplified map.
inline ComplexMatrix apply_amplified(const MatrixMap& t, Index k, const ComplexMatrix& x) {
  const Index m = t.domain().rows(), n = t.domain().cols();
  const Index r = t.codomain().rows(), s = t.codomain().cols();
  if (x.rows() != k * m || x.cols() != k * n) throw DimensionError("apply_amplified: argument shape mismatch");
  ComplexMatrix y = ComplexMatrix::Zero(k * r, k * s);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) y.block(a * r, b * s, r, s) = t.apply(x.block(a * m, b * n, m, n));
  return y;
}

/**
 * The map id_k (x) T : M_{km,kn} -> M_{km,ks}, acting on k x k block matrices blockwise.
 *
 * amplify(t, 1) equals t, and amplify(amplify(t, j), k) equals amplify(t, j*k)
 * under the block ordering used here (outer block index major).
 */
inline MatrixMap amplify(const MatrixMap& t, Index k) {
  if (k < 1) throw ArgumentError("amplify: level must be positive");
  const Index m = t.domain().rows(), n = t.domain().cols();
  const Index r = t.codomain().rows(), s = t.codomain().cols();
  const Shape dom(k * m, k * n), cod(k * r, k * s);
  std::vector<ComplexMatrix> action;
  action.reserve(static_cast<std::size_t>(dom.size()));
  for (Index row = 0; row < dom.rows(); ++row) {
    for (Index col = 0; col < dom.cols(); ++col) {
      ComplexMatrix img = ComplexMatrix::Zero(cod.rows(), cod.cols());
      img.block((row / m) * r, (col / n) * s, r, s) = t.unit_image(row % m, col % n);
      action.push_back(std::move(img));
    }
  }
  return MatrixMap(dom, cod, std::move(action));
}

/// The map y |-> T(y*)* from M_{n,m} to M_{s,r}.
inline MatrixMap adjoint_map(const MatrixMap& t) {
  const Index m = t.domain().rows(), n = t.domain().cols();
  std::vector<ComplexMatrix> action;
  action.reserve(static_cast<std::size_t>(t.domain().size()));
  // E_ji in M_{n,m} satisfies E_ji* = E_ij in M_{m,n}.
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) action.push_back(t.unit_image(i, j).adjoint());
  return MatrixMap(Shape(n, m), Shape(t.codomain().cols(), t.codomain().rows()), std::move(action));
}

/// Composition (outer o inner).
inline MatrixMap compose(const MatrixMap& outer, const MatrixMap& inner) {
  if (!(outer.domain() == inner.codomain())) throw DimensionError("compose: shapes do not chain");
  std::vector<ComplexMatrix> action;
  action.reserve(inner.action().size());
  for (const auto& a : inner.action()) action.push_back(outer.apply(a));
  return MatrixMap(inner.domain(), outer.codomain(), std::move(action));
}

/// Largest Frobenius distance between corresponding unit images.
inline double max_action_distance(const MatrixMap& a, const MatrixMap& b) {
  if (!(a.domain() == b.domain()) || !(a.codomain() == b.codomain())) {
    throw DimensionError("max_action_distance: shape mismatch");
  }
  double d = 0.0;
  for (std::size_t k = 0; k < a.action().size(); ++k) d = std::max(d, (a.action()[k] - b.action()[k]).norm());
  return d;
}

}  // namespace isolab

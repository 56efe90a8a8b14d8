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
 * @file gen.hpp
 * @brief Seeded generators of instances with known structure.
 *
 * All generators use std::mt19937_64 seeded from GenSpec::seed, so identical GenSpec values
 * give bit-identical outputs on a given standard library.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "cbnorm.hpp"
#include "errors.hpp"
#include "linmap.hpp"
#include "numeric.hpp"

namespace isolab {

struct GenSpec {
  Index m = 2, n = 2, r = 4, s = 4;
  Index multiplicity = 1;
  double contraction_scale = 0.5;  ///< 0 omits the complementary block
  std::uint64_t seed = 1;
  Index terms = 1;                  ///< unitary conjugations averaged in the complementary block
  bool identity_frame = false;      ///< use U = V = I
};

inline ComplexMatrix random_unitary(Index dim, std::mt19937_64& rng) {
  if (dim < 1) throw ArgumentError("random_unitary: dimension must be positive");
  const ComplexMatrix g = detail::gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    q.col(i) *= a > 0.0 ? d / a : Complex(1.0);
  }
  return q;
}

inline ComplexMatrix random_unitary(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_unitary(dim, rng);
}

/// A rows x cols partial isometry of the given rank.
inline ComplexMatrix random_partial_isometry(Index rows, Index cols, Index rank, std::mt19937_64& rng) {
  if (rank > std::min(rows, cols) || rank < 0) throw ArgumentError("random_partial_isometry: rank out of range");
  const ComplexMatrix a = random_unitary(rows, rng), b = random_unitary(cols, rng);
  return a.leftCols(rank) * b.leftCols(rank).adjoint();
}

/// Generator ground truth: T(x) = U diag(x, ..., x, S0(x)) V.
struct GroundTruth {
  ComplexMatrix u, v;
  Index multiplicity = 0;
  std::optional<MatrixMap> s0;  ///< complementary block; absent for a triple morphism
  ComplexMatrix p;              ///< expected right support projection in M_s
  ComplexMatrix q;              ///< expected left support projection in M_r
};

namespace detail {

inline void check_room(const GenSpec& g) {
  if (g.m < 1 || g.n < 1 || g.r < 1 || g.s < 1) throw ArgumentError("generator: shapes must be positive");
  if (g.multiplicity < 1) throw ArgumentError("generator: multiplicity must be at least 1");
  if (g.multiplicity * g.m > g.r || g.multiplicity * g.n > g.s) {
    throw ArgumentError("generator: multiplicity copies do not fit the codomain");
  }
}

inline MatrixMap assemble(const GenSpec& g, const ComplexMatrix& u, const ComplexMatrix& v,
                          const std::optional<MatrixMap>& s0) {
  const Index k = g.multiplicity;
  return MatrixMap::from_function(Shape(g.m, g.n), Shape(g.r, g.s), [&](const ComplexMatrix& x) {
    ComplexMatrix d = ComplexMatrix::Zero(g.r, g.s);
    for (Index c = 0; c < k; ++c) d.block(c * g.m, c * g.n, g.m, g.n) = x;
    if (s0) d.bottomRightCorner(g.r - k * g.m, g.s - k * g.n) = s0->apply(x);
    return ComplexMatrix(u * d * v);
  });
}

}  // namespace detail

/// T(x) = U diag(x, ..., x, 0) V with k copies and random unitaries U, V.
inline std::pair<MatrixMap, GroundTruth> random_triple_morphism(const GenSpec& g) {
  detail::check_room(g);
  std::mt19937_64 rng(g.seed);
  GroundTruth gt;
  gt.multiplicity = g.multiplicity;
  gt.u = g.identity_frame ? ComplexMatrix::Identity(g.r, g.r) : random_unitary(g.r, rng);
  gt.v = g.identity_frame ? ComplexMatrix::Identity(g.s, g.s) : random_unitary(g.s, rng);
  gt.p = ComplexMatrix::Zero(g.s, g.s);
  gt.q = ComplexMatrix::Zero(g.r, g.r);
  return {detail::assemble(g, gt.u, gt.v, std::nullopt), gt};
}

/**
 * T(x) = U diag(x, ..., x, S0(x)) V where
 * S0(x) = scale * sum_j c_j W_j J1 x J2 W'_j with convex weights c_j, unitaries
 * W_j, W'_j and contractive partial isometries J1, J2, so ||S0||_cb <= scale.
 */
inline std::pair<MatrixMap, GroundTruth> random_complete_isometry(const GenSpec& g) {
  detail::check_room(g);
  const Index k = g.multiplicity;
  const Index rr = g.r - k * g.m, ss = g.s - k * g.n;
  if (g.contraction_scale < 0.0 || g.contraction_scale >= 1.0) {
    throw ArgumentError("random_complete_isometry: contraction scale must lie in [0, 1)");
  }
  if (g.contraction_scale > 0.0 && (rr == 0 || ss == 0)) {
    throw ArgumentError("random_complete_isometry: no room for the complementary block");
  }
  if (g.contraction_scale == 0.0) return random_triple_morphism(g);

  std::mt19937_64 rng(g.seed);
  GroundTruth gt;
  gt.multiplicity = k;
  gt.u = g.identity_frame ? ComplexMatrix::Identity(g.r, g.r) : random_unitary(g.r, rng);
  gt.v = g.identity_frame ? ComplexMatrix::Identity(g.s, g.s) : random_unitary(g.s, rng);
  const ComplexMatrix j1 = random_partial_isometry(rr, g.m, std::min(rr, g.m), rng);
  const ComplexMatrix j2 = random_partial_isometry(g.n, ss, std::min(g.n, ss), rng);
  const Index terms = std::max<Index>(1, g.terms);
  std::vector<ComplexMatrix> w, wp;
  std::vector<double> c;
  std::uniform_real_distribution<double> ud(0.2, 1.0);
  double total = 0.0;
  for (Index t = 0; t < terms; ++t) {
    w.push_back(random_unitary(rr, rng));
    wp.push_back(random_unitary(ss, rng));
    c.push_back(ud(rng));
    total += c.back();
  }
  for (auto& x : c) x /= total;
  const double scale = g.contraction_scale;
  MatrixMap s0 = MatrixMap::from_function(Shape(g.m, g.n), Shape(rr, ss), [&](const ComplexMatrix& x) {
    ComplexMatrix y = ComplexMatrix::Zero(rr, ss);
    for (Index t = 0; t < terms; ++t) y += c[static_cast<std::size_t>(t)] * w[static_cast<std::size_t>(t)] * j1 * x * j2 * wp[static_cast<std::size_t>(t)];
    return ComplexMatrix(scale * y);
  });
  ComplexMatrix hr = ComplexMatrix::Zero(ss, ss), hl = ComplexMatrix::Zero(rr, rr);
  for (const auto& y : s0.action()) {
    hr += y.adjoint() * y;
    hl += y * y.adjoint();
  }
  ComplexMatrix pr = ComplexMatrix::Zero(g.s, g.s), ql = ComplexMatrix::Zero(g.r, g.r);
  pr.bottomRightCorner(ss, ss) = spectral_support(hr, 1e-10);
  ql.bottomRightCorner(rr, rr) = spectral_support(hl, 1e-10);
  gt.p = gt.v.adjoint() * pr * gt.v;
  gt.q = gt.u * ql * gt.u.adjoint();
  MatrixMap t = detail::assemble(g, gt.u, gt.v, s0);
  gt.s0 = std::move(s0);
  return {std::move(t), std::move(gt)};
}

/// A map with a recorded level-1 witness X (||X|| = 1) of ||T(X)|| = ratio > 1.
struct NonContraction {
  MatrixMap map;
  ComplexMatrix witness;
  double ratio = 0.0;
};

inline NonContraction random_noncontraction(const GenSpec& g, double margin) {
  if (margin <= 0.0) throw ArgumentError("random_noncontraction: margin must be positive");
  std::mt19937_64 rng(g.seed);
  std::vector<ComplexMatrix> action;
  for (Index k = 0; k < g.m * g.n; ++k) action.push_back(detail::gaussian_matrix(g.r, g.s, rng));
  MatrixMap t(Shape(g.m, g.n), Shape(g.r, g.s), std::move(action));
  ComplexMatrix x = detail::gaussian_matrix(g.m, g.n, rng);
  x /= op_norm(x);
  const double base = op_norm(t.apply(x));
  const double target = 1.0 + margin;
  MatrixMap scaled = t * Complex(target / base);
  const double ratio = op_norm(scaled.apply(x));
  return NonContraction{std::move(scaled), x, ratio};
}

/// A complete isometry precomposed with a non-unitary invertible map.
struct PerturbedIsometry {
  MatrixMap map;
  MatrixMap base;
  ComplexMatrix witness;  ///< ||T'(witness)|| = (1 - delta) ||witness||
  double ratio = 0.0;
  double distance = 0.0;  ///< Frobenius norm of the action difference
};

/**
 * T'(x) = T(x ((1 - delta) I + delta P)) with P a rank n-1 projection (or the
 * left-sided analogue when n = 1, or plain scaling when m = n = 1).
 */
inline PerturbedIsometry random_perturbed_isometry(const GenSpec& g, double delta) {
  if (delta <= 0.0 || delta >= 1.0) throw ArgumentError("random_perturbed_isometry: delta must lie in (0, 1)");
  auto [t, gt] = random_complete_isometry(g);
  std::mt19937_64 rng(g.seed ^ 0x9e3779b97f4a7c15ULL);
  ComplexMatrix witness;
  MatrixMap pert = t;
  if (g.n >= 2 || g.m >= 2) {
    const bool right = g.n >= 2;
    const Index d = right ? g.n : g.m;
    const ComplexMatrix w = random_unitary(d, rng);
    const ComplexMatrix proj = w.leftCols(d - 1) * w.leftCols(d - 1).adjoint();
    const ComplexMatrix mix = (1.0 - delta) * ComplexMatrix::Identity(d, d) + delta * proj;
    const ComplexVector killed = w.col(d - 1);
    const ComplexVector other = random_unitary(right ? g.m : g.n, rng).col(0);
    if (right) {
      pert = t.precompose(ComplexMatrix::Identity(g.m, g.m), mix);
      witness = other * killed.adjoint();
    } else {
      pert = t.precompose(mix, ComplexMatrix::Identity(g.n, g.n));
      witness = killed * other.adjoint();
    }
  } else {
    pert = t * Complex(1.0 - delta);
    witness = ComplexMatrix::Ones(1, 1);
  }
  const double ratio = op_norm(pert.apply(witness)) / op_norm(witness);
  const double dist = (pert - t).action_norm();
  return PerturbedIsometry{std::move(pert), std::move(t), std::move(witness), ratio, dist};
}

}  // namespace isolab

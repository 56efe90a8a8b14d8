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
 * @file holsztynski.hpp
 * @brief Isometries between spaces of functions on finite sets.
 *
 * A linear map T : l_inf(k1) -> l_inf(k2) is a k2 x k1 matrix whose row y is
 * the functional f |-> T(f)(y).  T is an isometry iff it is contractive and
 * there is a set E of rows with T(f)(y) = gamma(y) f(phi(y)) for y in E,
 * |gamma| = 1 and phi : E -> {0..k1-1} onto.
 *
 * Points are 0-based throughout.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "decompose.hpp"
#include "envelope.hpp"
#include "errors.hpp"
#include "linmap.hpp"

namespace isolab {

struct CommutativeMap {
  Index k1 = 0, k2 = 0;
  ComplexMatrix matrix;  ///< k2 x k1

  CommutativeMap() = default;
  explicit CommutativeMap(ComplexMatrix m) : k1(m.cols()), k2(m.rows()), matrix(std::move(m)) {
    if (k1 < 1 || k2 < 1) throw DimensionError("CommutativeMap: both point sets must be nonempty");
  }

  ComplexVector apply(const ComplexVector& f) const {
    if (f.size() != k1) throw DimensionError("CommutativeMap::apply: vector length must be k1");
    return matrix * f;
  }
};

struct HolsztynskiCertificate {
  std::vector<Index> e;       ///< rows of the form gamma(y) times a coordinate functional
  std::vector<Complex> gamma;  ///< gamma[i] belongs to row e[i]
  std::vector<Index> phi;      ///< phi[i] belongs to row e[i]
  bool surjective = false;
  std::vector<Index> uncovered;  ///< domain points not hit by phi
};

/// Row criterion: ||T|| <= 1 iff every absolute row sum is at most 1.
inline bool contractive(const CommutativeMap& cm, double tol = kDefaultTol) {
  for (Index y = 0; y < cm.k2; ++y)
    if (cm.matrix.row(y).cwiseAbs().sum() > 1.0 + tol) return false;
  return true;
}

/// Operator norm l_inf -> l_inf: the largest absolute row sum.
inline double linf_norm(const CommutativeMap& cm) { return cm.matrix.rowwise().lpNorm<1>().maxCoeff(); }

inline HolsztynskiCertificate extract_certificate(const CommutativeMap& cm, double tol = kDefaultTol) {
  if (tol >= 0.5) throw ArgumentError("extract_certificate: tol must be below 1/2");
  HolsztynskiCertificate c;
  std::vector<bool> hit(static_cast<std::size_t>(cm.k1), false);
  for (Index y = 0; y < cm.k2; ++y) {
    Index big = -1, bigs = 0;
    bool clean = true;
    for (Index x = 0; x < cm.k1; ++x) {
      const double a = std::abs(cm.matrix(y, x));
      if (std::abs(a - 1.0) <= tol) {
        ++bigs;
        big = x;
      } else if (a > tol) {
        clean = false;
      }
    }
    if (bigs == 1 && clean) {
      c.e.push_back(y);
      c.gamma.push_back(cm.matrix(y, big));
      c.phi.push_back(big);
      hit[static_cast<std::size_t>(big)] = true;
    }
    // Two unimodular entries force a row sum near 2.
    if (bigs > 1 && contractive(cm, tol)) throw StructureError("extract_certificate: contractive row with a tie");
  }
  for (Index x = 0; x < cm.k1; ++x)
    if (!hit[static_cast<std::size_t>(x)]) c.uncovered.push_back(x);
  c.surjective = c.uncovered.empty();
  return c;
}

inline bool isometry_verdict(const CommutativeMap& cm, double tol = kDefaultTol) {
  return contractive(cm, tol) && extract_certificate(cm, tol).surjective;
}

/// Largest |T(f)(y) - gamma(y) f(phi(y))| over y in E, relative to ||f||_inf.
inline double resynthesis_residual(const CommutativeMap& cm, const HolsztynskiCertificate& c, const ComplexVector& f) {
  const ComplexVector tf = cm.apply(f);
  const double nf = std::max(f.cwiseAbs().maxCoeff(), 1e-300);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.e.size(); ++i)
    worst = std::max(worst, std::abs(tf(c.e[i]) - c.gamma[i] * f(c.phi[i])) / nf);
  return worst;
}

/// The same map on diagonal matrices: diag(f) |-> diag(T f).
inline MatrixMap diagonal_map(const CommutativeMap& cm) {
  std::vector<ComplexMatrix> action;
  for (Index i = 0; i < cm.k1; ++i)
    for (Index j = 0; j < cm.k1; ++j) {
      ComplexMatrix y = ComplexMatrix::Zero(cm.k2, cm.k2);
      if (i == j) y.diagonal() = cm.matrix.col(i);
      action.push_back(std::move(y));
    }
  return MatrixMap(Shape(cm.k1, cm.k1), Shape(cm.k2, cm.k2), std::move(action));
}

/// Recovers a commutative map from a diagonal-to-diagonal matrix map.
/// Throws StructureError when the map is not of that form.
inline CommutativeMap from_diagonal_map(const MatrixMap& t, double tol = kDefaultTol) {
  if (!t.domain().square() || !t.codomain().square()) {
    throw StructureError("from_diagonal_map: shapes must be square");
  }
  const Index k1 = t.domain().rows(), k2 = t.codomain().rows();
  ComplexMatrix m(k2, k1);
  for (Index i = 0; i < k1; ++i)
    for (Index j = 0; j < k1; ++j) {
      const ComplexMatrix& y = t.unit_image(i, j);
      if (i != j) {
        if (y.norm() > tol) throw StructureError("from_diagonal_map: an off-diagonal unit has a nonzero image");
        continue;
      }
      ComplexMatrix off = y;
      off.diagonal().setZero();
      if (off.norm() > tol) throw StructureError("from_diagonal_map: an image is not diagonal");
      m.col(i) = y.diagonal();
    }
  return CommutativeMap(std::move(m));
}

struct DiagonalAnalysis {
  Verdict verdict = Verdict::undecided;
  bool contractive = false;
  bool injective = false;
  bool consistent = false;
  double inconsistency = 0.0;
};

/**
 * Complete-isometry verdict for diag(f) |-> diag(T f) from the triple
 * envelope of the diagonal range.  Into a commutative algebra the norm is
 * the cb norm, so contractivity is the row criterion; the rest is the
 * envelope consistency test restricted to the diagonal domain.
 */
inline DiagonalAnalysis analyze_diagonal(const CommutativeMap& cm, double tol = kDefaultTol) {
  DiagonalAnalysis out;
  out.contractive = contractive(cm, tol);
  out.injective = numerical_rank(cm.matrix, tol) == cm.k1;
  if (!out.contractive || !out.injective) {
    out.verdict = Verdict::not_complete_isometry;
    return out;
  }
  std::vector<ComplexMatrix> dom, img;
  for (Index i = 0; i < cm.k1; ++i) {
    ComplexMatrix a = ComplexMatrix::Zero(cm.k1, cm.k1), b = ComplexMatrix::Zero(cm.k2, cm.k2);
    a(i, i) = 1.0;
    b.diagonal() = cm.matrix.col(i);
    dom.push_back(std::move(a));
    img.push_back(std::move(b));
  }
  const EnvelopeCore core = envelope_core(dom, img, tol);
  out.consistent = core.consistent;
  out.inconsistency = core.inconsistency;
  out.verdict = core.consistent ? Verdict::complete_isometry : Verdict::not_complete_isometry;
  return out;
}

struct CompositionTruth {
  std::vector<Index> e;
  std::vector<Complex> gamma;
  std::vector<Index> phi;
  bool surjective = false;
};

/**
 * T(f)(y) = gamma(y) f(phi(y)) on a random set E of rows and random
 * contractive junk rows (absolute row sum at most 0.9) elsewhere.  With
 * real = true the weights are +-1 and the junk rows are real.
 */
inline std::pair<CommutativeMap, CompositionTruth> random_composition_map(Index k1, Index k2, std::uint64_t seed,
                                                                         bool real, bool surjective = true) {
  if (k1 < 1 || k2 < 1) throw ArgumentError("random_composition_map: sizes must be positive");
  if (surjective && k2 < k1) throw ArgumentError("random_composition_map: a surjection needs k2 >= k1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::vector<Index> rows(static_cast<std::size_t>(k2));
  std::iota(rows.begin(), rows.end(), Index{0});
  std::shuffle(rows.begin(), rows.end(), rng);
  // |E| >= k1 when onto; otherwise phi misses at least one point.
  const Index lo = surjective ? k1 : 1;
  const Index esize = lo + static_cast<Index>(rng() % static_cast<std::uint64_t>(k2 - lo + 1));
  std::vector<Index> targets;
  if (surjective) {
    targets.resize(static_cast<std::size_t>(k1));
    std::iota(targets.begin(), targets.end(), Index{0});
  }
  const Index range = surjective || k1 == 1 ? k1 : k1 - 1;
  const Index skip = static_cast<Index>(rng() % static_cast<std::uint64_t>(k1));
  while (static_cast<Index>(targets.size()) < esize) {
    Index x = static_cast<Index>(rng() % static_cast<std::uint64_t>(range));
    if (!surjective && k1 > 1 && x >= skip) ++x;
    targets.push_back(x);
  }
  std::shuffle(targets.begin(), targets.end(), rng);

  ComplexMatrix m = ComplexMatrix::Zero(k2, k1);
  CompositionTruth truth;
  for (Index i = 0; i < k2; ++i) {
    const Index y = rows[static_cast<std::size_t>(i)];
    if (i < esize) {
      const Index x = targets[static_cast<std::size_t>(i)];
      const Complex g = real ? Complex(rng() % 2 ? -1.0 : 1.0) : std::polar(1.0, 2.0 * M_PI * ud(rng));
      m(y, x) = g;
      truth.e.push_back(y);
      truth.gamma.push_back(g);
      truth.phi.push_back(x);
    } else {
      ComplexVector row(k1);
      for (Index x = 0; x < k1; ++x) {
        const double a = 2.0 * ud(rng) - 1.0;
        row(x) = real ? Complex(a) : std::polar(std::abs(a), 2.0 * M_PI * ud(rng));
      }
      const double sum = row.cwiseAbs().sum();
      const double target = 0.9 * ud(rng);
      if (sum > 0.0) row *= target / sum;
      m.row(y) = row.transpose();
    }
  }
  // Report E in row order.
  std::vector<std::size_t> order(truth.e.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return truth.e[a] < truth.e[b]; });
  CompositionTruth sorted;
  for (const auto i : order) {
    sorted.e.push_back(truth.e[i]);
    sorted.gamma.push_back(truth.gamma[i]);
    sorted.phi.push_back(truth.phi[i]);
  }
  std::vector<bool> hit(static_cast<std::size_t>(k1), false);
  for (const auto x : sorted.phi) hit[static_cast<std::size_t>(x)] = true;
  sorted.surjective = std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  return {CommutativeMap(std::move(m)), std::move(sorted)};
}

}  // namespace isolab

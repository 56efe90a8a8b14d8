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
 * @file nicex.hpp
 * @brief A stack of unital contractions of l_inf(n) whose direct sum admits
 * no reducing projection that turns it into a *-homomorphism.
 *
 * psi_k(a)_r = (1 - eps_k) a_r + eps_k / (n - 1) sum_{j != r} a_j and
 * Psi(a) = diag(psi_1(a), ..., psi_K(a)) in M_{nK}.  The family is truncated
 * at K levels; only ||Psi(a)|| >= (1 - 2 eps_K) ||a|| survives truncation,
 * while the projection rigidity holds level by level.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "linmap.hpp"

namespace isolab {

enum class NicexMode {
  diagonal,  ///< psi_k on the diagonal of M_n; off-diagonal units map to 0
  matrix     ///< off-diagonal entries multiplied by 1 - eps_k
};

struct NicexConfig {
  Index n = 3;
  Index levels = 4;
  std::vector<double> epsilons;  ///< empty means eps_k = 1/(k + 2), k = 1..levels
  NicexMode mode = NicexMode::diagonal;

  std::vector<double> resolved_epsilons() const {
    if (!epsilons.empty()) return epsilons;
    std::vector<double> e;
    for (Index k = 1; k <= levels; ++k) e.push_back(1.0 / static_cast<double>(k + 2));
    return e;
  }

  void validate() const {
    if (n < 2) throw ConfigError("nicex: n must be at least 2");
    if (levels < 1) throw ConfigError("nicex: levels must be at least 1");
    const auto e = resolved_epsilons();
    if (static_cast<Index>(e.size()) != levels) throw ConfigError("nicex: need one epsilon per level");
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (!(e[k] > 0.0 && e[k] < 1.0)) throw ConfigError("nicex: epsilons must lie in (0, 1)");
      if (k > 0 && !(e[k] < e[k - 1])) throw ConfigError("nicex: epsilons must be strictly decreasing");
      // 1 - eps = eps / (n - 1) makes psi_k a multiple of the averaging map.
      const double collide = static_cast<double>(n - 1) / static_cast<double>(n);
      if (std::abs(e[k] - collide) <= 1e-12) throw ConfigError("nicex: epsilon equals (n-1)/n; eigenvalues collide");
    }
  }
};

struct NicexMaps {
  NicexConfig config;
  std::vector<double> eps;
  std::vector<ComplexMatrix> coeff;  ///< psi_k as an n x n row-stochastic matrix on coordinates
  std::vector<MatrixMap> psi;        ///< psi_k : M_n -> M_n
  MatrixMap big_psi = MatrixMap::zero(Shape(1, 1), Shape(1, 1));  ///< Psi : M_n -> M_{nK}

  Index size() const { return config.n * config.levels; }

  /// psi_k(a) on a coordinate vector.
  ComplexVector apply_psi(Index k, const ComplexVector& a) const { return coeff[static_cast<std::size_t>(k)] * a; }
};

inline NicexMaps build_nicex(const NicexConfig& config) {
  config.validate();
  NicexMaps out;
  out.config = config;
  out.eps = config.resolved_epsilons();
  const Index n = config.n, kk = config.levels;
  const Shape dom(n, n);
  std::vector<ComplexMatrix> big(static_cast<std::size_t>(n * n), ComplexMatrix::Zero(n * kk, n * kk));
  for (Index k = 0; k < kk; ++k) {
    const double e = out.eps[static_cast<std::size_t>(k)];
    ComplexMatrix c = ComplexMatrix::Constant(n, n, Complex(e / static_cast<double>(n - 1)));
    c.diagonal().setConstant(1.0 - e);
    out.coeff.push_back(c);
    std::vector<ComplexMatrix> action;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        ComplexMatrix y = ComplexMatrix::Zero(n, n);
        if (i == j) {
          y.diagonal() = c.col(i);
        } else if (config.mode == NicexMode::matrix) {
          y(i, j) = 1.0 - e;
        }
        big[static_cast<std::size_t>(i * n + j)].block(k * n, k * n, n, n) = y;
        action.push_back(std::move(y));
      }
    out.psi.emplace_back(dom, dom, std::move(action));
  }
  out.big_psi = MatrixMap(dom, Shape(n * kk, n * kk), std::move(big));
  return out;
}

/// Psi replaced by a |-> diag(a, ..., a): a *-homomorphism, used as a control.
inline NicexMaps build_control(const NicexConfig& config) {
  NicexMaps out = build_nicex(config);
  const Index n = config.n, kk = config.levels;
  std::vector<ComplexMatrix> big;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      ComplexMatrix y = ComplexMatrix::Zero(n * kk, n * kk);
      if (i == j || config.mode == NicexMode::matrix)
        for (Index k = 0; k < kk; ++k) y(k * n + i, k * n + j) = 1.0;
      big.push_back(std::move(y));
    }
  out.big_psi = MatrixMap(Shape(n, n), Shape(n * kk, n * kk), std::move(big));
  return out;
}

struct LowerBoundReport {
  Index samples = 0;
  Index violations = 0;          ///< ||psi_k(a)|| < (1 - 2 eps_k) ||a|| - tol
  Index sup_violations = 0;      ///< max_k ||psi_k(a)|| < (1 - 2 eps_K) ||a|| - tol
  Index contraction_violations = 0;  ///< ||psi_k(a)|| > ||a|| + tol
  double worst_ratio = std::numeric_limits<double>::infinity();  ///< least ||psi_k(a)|| / ((1 - 2 eps_k) ||a||)
  double row_sum_error = 0.0;    ///< max |row sum - 1|
  bool nonnegative = true;
  bool passed() const { return violations == 0 && sup_violations == 0 && contraction_violations == 0; }
};

/// Random complex a with entries in the unit disk; every k is checked.
inline LowerBoundReport lower_bound_check(const NicexMaps& maps, Index samples, std::uint64_t seed,
                                          double tol = 1e-12) {
  LowerBoundReport rep;
  rep.samples = samples;
  const Index n = maps.config.n;
  for (const auto& c : maps.coeff) {
    rep.row_sum_error = std::max(rep.row_sum_error, (c.rowwise().sum() - ComplexVector::Ones(n)).cwiseAbs().maxCoeff());
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (c(i, j).real() < 0.0 || c(i, j).imag() != 0.0) rep.nonnegative = false;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (Index s = 0; s < samples; ++s) {
    ComplexVector a(n);
    for (Index i = 0; i < n; ++i) a(i) = Complex(ud(rng), s % 2 ? ud(rng) : 0.0);
    const double na = a.cwiseAbs().maxCoeff();
    double best = 0.0;
    for (std::size_t k = 0; k < maps.coeff.size(); ++k) {
      const double v = maps.apply_psi(static_cast<Index>(k), a).cwiseAbs().maxCoeff();
      const double bound = (1.0 - 2.0 * maps.eps[k]) * na;
      if (v < bound - tol) ++rep.violations;
      if (v > na + tol) ++rep.contraction_violations;
      if (bound > 0.0) rep.worst_ratio = std::min(rep.worst_ratio, v / bound);
      best = std::max(best, v);
    }
    if (best < (1.0 - 2.0 * maps.eps.back()) * na - tol) ++rep.sup_violations;
  }
  return rep;
}

struct NoProjectionReport {
  Index commutant_dim = 0;
  bool commutant_is_diagonal = false;
  bool enumerated = false;          ///< false when nK exceeds the enumeration limit
  std::uint64_t masks_checked = 0;
  std::uint64_t surviving = 0;      ///< projections p with (1 - p) Psi(.) a *-homomorphism
  std::vector<std::uint64_t> survivors;  ///< first few surviving masks (bit i = p_ii)
  bool only_identity_survives() const { return enumerated && surviving == 1 && survivors.front() == all_ones; }
  std::uint64_t all_ones = 0;
};

inline constexpr Index kNicexEnumerationLimit = 24;

namespace detail {

// (1 - p) Psi(.) commutes with p and is a *-homomorphism on the domain units.
inline bool survives(const std::vector<ComplexMatrix>& units_img, Index n, const std::vector<double>& keep, double tol) {
  const auto idx = [n](Index i, Index j) { return static_cast<std::size_t>(i * n + j); };
  const Index dim = static_cast<Index>(keep.size());
  const auto cut = [&](const ComplexMatrix& y) {
    ComplexMatrix z = y;
    for (Index r = 0; r < dim; ++r) z.row(r) *= keep[static_cast<std::size_t>(r)];
    return z;
  };
  std::vector<ComplexMatrix> h;
  for (const auto& y : units_img) {
    ComplexMatrix right = y;
    for (Index c = 0; c < dim; ++c) right.col(c) *= keep[static_cast<std::size_t>(c)];
    const ComplexMatrix left = cut(y);
    if ((left - right).norm() > tol) return false;
    h.push_back(left);
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const ComplexMatrix& a = h[idx(i, j)];
      if (a.norm() == 0.0 && units_img[idx(i, j)].norm() == 0.0) continue;
      if ((h[idx(j, i)] - a.adjoint()).norm() > tol) return false;
      for (Index l = 0; l < n; ++l) {
        const ComplexMatrix& b = h[idx(j, l)];
        if ((a * b - h[idx(i, l)]).norm() > tol) return false;
        // E_ij E_kl = 0 for k != j.
        for (Index k = 0; k < n; ++k)
          if (k != j && (a * h[idx(k, l)]).norm() > tol) return false;
      }
    }
  return true;
}

}  // namespace detail

/**
 * Commutant of D_i = Psi(E_ii) by a linear solve, then every diagonal 0/1
 * projection p checked for (1 - p) Psi(.) being a *-homomorphism that
 * commutes with p.  Enumeration is refused when nK exceeds
 * kNicexEnumerationLimit.
 */
inline NoProjectionReport no_projection_check(const NicexMaps& maps, double tol = 1e-10, bool enumerate = true) {
  NoProjectionReport rep;
  const Index n = maps.config.n, dim = maps.big_psi.codomain().rows();
  std::vector<ComplexMatrix> d;
  for (Index i = 0; i < n; ++i) d.push_back(maps.big_psi.unit_image(i, i));
  const auto comm = detail::commutant_of(d, dim, tol);
  rep.commutant_dim = static_cast<Index>(comm.size());
  double off = 0.0;
  for (const auto& c : comm) {
    ComplexMatrix o = c;
    o.diagonal().setZero();
    off = std::max(off, o.norm());
  }
  rep.commutant_is_diagonal = rep.commutant_dim == dim && off <= 1e3 * tol;
  rep.all_ones = dim >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << dim) - 1;
  if (!enumerate || dim > kNicexEnumerationLimit) return rep;
  rep.enumerated = true;
  // Psi is block diagonal in n x n blocks, so the condition on p factors
  // over blocks: tabulate each block's 2^n sub-masks, then sweep all masks.
  const Index kk = dim / n;
  const std::uint64_t sub = std::uint64_t{1} << n;
  std::vector<std::vector<bool>> block_ok(static_cast<std::size_t>(kk), std::vector<bool>(sub, false));
  for (Index k = 0; k < kk; ++k) {
    std::vector<ComplexMatrix> img;
    for (const auto& y : maps.big_psi.action()) {
      ComplexMatrix outside = y;
      outside.block(k * n, k * n, n, n).setZero();
      img.push_back(y.block(k * n, k * n, n, n));
      if (k == 0) {
        for (Index b = 1; b < kk; ++b) outside.block(b * n, b * n, n, n).setZero();
        if (outside.norm() > tol) throw StructureError("no_projection_check: Psi is not block diagonal");
      }
    }
    for (std::uint64_t m = 0; m < sub; ++m) {
      std::vector<double> keep(static_cast<std::size_t>(n));
      for (Index b = 0; b < n; ++b) keep[static_cast<std::size_t>(b)] = (m >> b) & 1U ? 0.0 : 1.0;
      block_ok[static_cast<std::size_t>(k)][m] = detail::survives(img, n, keep, tol);
    }
  }
  for (std::uint64_t mask = 0; mask <= rep.all_ones; ++mask) {
    ++rep.masks_checked;
    bool ok = true;
    for (Index k = 0; k < kk && ok; ++k) ok = block_ok[static_cast<std::size_t>(k)][(mask >> (k * n)) & (sub - 1)];
    if (ok) {
      ++rep.surviving;
      if (rep.survivors.size() < 16) rep.survivors.push_back(mask);
    }
  }
  return rep;
}

}  // namespace isolab

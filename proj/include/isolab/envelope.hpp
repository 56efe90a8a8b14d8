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
 * @file envelope.hpp
 * @brief The triple system generated by the range of a map, its canonical
 * morphism back onto the domain, and the reducing compression.
 *
 * For injective T : M_{m,n} -> M_{r,s}:
 *  1. Z is the triple system generated by T(M_{m,n}).
 *  2. rho : Z -> M_{m,n} is the linear map sending each word in the T(a) to
 *     the same word in the a.  If two combinations of words agree in Z but
 *     not in the domain, rho does not exist and T is not a complete isometry.
 *  3. N = ker rho, p = support of N* N, q = support of N N*.
 *  4. theta(a) = (1 - q) T(a) (1 - p).
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "linmap.hpp"
#include "numeric.hpp"
#include "report.hpp"

namespace isolab {

/// Thrown when the map to be analyzed has a nontrivial kernel.
class NonInjectiveError : public PreconditionError {
 public:
  NonInjectiveError(const std::string& what, ComplexMatrix kernel_element)
      : PreconditionError(what), kernel_element_(std::move(kernel_element)) {}
  const ComplexMatrix& kernel_element() const { return kernel_element_; }

 private:
  ComplexMatrix kernel_element_;
};

/// Envelope data that does not depend on the domain being a full matrix space.
struct EnvelopeCore {
  MatrixSubspace z;
  std::vector<ComplexMatrix> preimages;  ///< rho(z_k) for the basis of z
  ComplexMatrix rho;                     ///< column k = coords(preimages[k])
  MatrixSubspace n;                      ///< ker rho
  Projection p;                          ///< support of N* N, in M_s
  Projection q;                          ///< support of N N*, in M_r
  bool consistent = false;
  /// 1 - sigma sqrt(1 + d), clipped at 0, where sigma is the smallest gain of
  /// the projection from the graph system onto Z and d bounds domain ranks.
  double inconsistency = 0.0;
  std::optional<ComplexMatrix> witness;  ///< domain part of a graph element whose Z part (nearly) vanishes
};

/**
 * Envelope for a map given on an arbitrary linearly independent family of
 * domain elements (for instance the diagonal units of a commutative domain).
 *
 * rho is read off the triple system G generated by the pairs diag(T(a), a).
 * When rho is well defined, G is its graph and, rho being contractive, the
 * projection G -> Z has Frobenius gain at least 1 / sqrt(1 + d); any smaller
 * gain exhibits an element diag(w(T a), w(a)) with w(T a) ~ 0 and w(a) != 0.
 */
inline EnvelopeCore envelope_core(const std::vector<ComplexMatrix>& domain_basis,
                                  const std::vector<ComplexMatrix>& images, double tol = kDefaultTol) {
  if (domain_basis.empty() || domain_basis.size() != images.size()) {
    throw DimensionError("envelope_core: need one image per domain basis element");
  }
  const Shape cod(images[0].rows(), images[0].cols());
  const Shape dom(domain_basis[0].rows(), domain_basis[0].cols());
  {
    ComplexMatrix img(cod.size(), static_cast<Index>(images.size()));
    for (std::size_t k = 0; k < images.size(); ++k) img.col(static_cast<Index>(k)) = coords(images[k]);
    const ComplexMatrix ker = null_space(img, tol);
    if (ker.cols() > 0) {
      ComplexMatrix a = ComplexMatrix::Zero(dom.rows(), dom.cols());
      for (std::size_t k = 0; k < domain_basis.size(); ++k) a += ker(static_cast<Index>(k), 0) * domain_basis[k];
      throw NonInjectiveError("envelope: the map is not injective", a);
    }
  }
  const Shape graph(cod.rows() + dom.rows(), cod.cols() + dom.cols());
  std::vector<ComplexMatrix> seeds;
  for (std::size_t k = 0; k < images.size(); ++k) {
    ComplexMatrix g = ComplexMatrix::Zero(graph.rows(), graph.cols());
    g.topLeftCorner(cod.rows(), cod.cols()) = images[k];
    g.bottomRightCorner(dom.rows(), dom.cols()) = domain_basis[k];
    seeds.push_back(std::move(g));
  }
  const MatrixSubspace gsys = triple_closure(MatrixSubspace(graph, seeds, tol), tol);
  const Index dg = gsys.dim();
  ComplexMatrix top(cod.size(), dg), bottom(dom.size(), dg);
  for (Index k = 0; k < dg; ++k) {
    const ComplexMatrix& g = gsys.basis()[static_cast<std::size_t>(k)];
    top.col(k) = coords(ComplexMatrix(g.topLeftCorner(cod.rows(), cod.cols())));
    bottom.col(k) = coords(ComplexMatrix(g.bottomRightCorner(dom.rows(), dom.cols())));
  }

  EnvelopeCore core{MatrixSubspace(cod), {}, {}, MatrixSubspace(cod), Projection::zero(cod.cols()),
                    Projection::zero(cod.rows()), false, 0.0, std::nullopt};
  const Eigen::JacobiSVD<ComplexMatrix> svd(top, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index last = std::min(top.rows(), top.cols()) - 1;
  const double gain = top.rows() >= dg ? svd.singularValues()(last) : 0.0;
  const double bound = 1.0 / std::sqrt(1.0 + static_cast<double>(std::min(dom.rows(), dom.cols())));
  core.inconsistency = std::max(0.0, 1.0 - gain / bound);
  core.consistent = core.inconsistency <= std::sqrt(tol);
  if (!core.consistent) {
    ComplexVector v;
    if (top.rows() >= dg) {
      v = svd.matrixV().col(last);
    } else {
      v = null_space(top, tol).col(0);
    }
    core.witness = from_coords(bottom * v, dom);
    core.z = MatrixSubspace::from_coordinates(cod, top.rows() >= dg ? svd.matrixU() : range_frame(top, tol), tol);
    return core;
  }

  // Z = top(G), rho = bottom o top^{-1}; top has full column rank with a gap.
  core.z = MatrixSubspace::from_coordinates(cod, svd.matrixU(), tol);
  const ComplexMatrix to_graph = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
                                 svd.matrixU().adjoint() * core.z.coordinate_basis();
  core.rho = bottom * to_graph;
  for (Index k = 0; k < core.rho.cols(); ++k) core.preimages.push_back(from_coords(core.rho.col(k), dom));

  const ComplexMatrix ker = null_space(core.rho, tol);
  std::vector<ComplexMatrix> nb;
  for (Index c = 0; c < ker.cols(); ++c) nb.push_back(from_coords(core.z.coordinate_basis() * ker.col(c), cod));
  core.n = MatrixSubspace(cod, nb, tol);

  // The supports of span N*N and span NN* are those of sum n* n and sum n n*.
  ComplexMatrix right = ComplexMatrix::Zero(cod.cols(), cod.cols()), left = ComplexMatrix::Zero(cod.rows(), cod.rows());
  for (const auto& x : core.n.basis()) {
    right += x.adjoint() * x;
    left += x * x.adjoint();
  }
  core.p = Projection(spectral_support(right, std::max(tol, 1e-12)), 1e-8);
  core.q = Projection(spectral_support(left, std::max(tol, 1e-12)), 1e-8);
  return core;
}

struct EnvelopeResult {
  MatrixMap t;
  EnvelopeCore core;
  MatrixMap theta;  ///< a |-> (1 - q) T(a) (1 - p); equals T when inconsistent

  const MatrixSubspace& z() const { return core.z; }
  const MatrixSubspace& n() const { return core.n; }
  const Projection& p() const { return core.p; }
  const Projection& q() const { return core.q; }
  bool consistent() const { return core.consistent; }

  /// rho(x) for x in Z.
  ComplexMatrix rho(const ComplexMatrix& x) const {
    const ComplexVector c = core.z.coefficients(x);
    ComplexMatrix y = ComplexMatrix::Zero(t.domain().rows(), t.domain().cols());
    for (Index k = 0; k < c.size(); ++k) y += c(k) * core.preimages[static_cast<std::size_t>(k)];
    return y;
  }
};

/// Builds the envelope of an injective map; see the file comment.
inline EnvelopeResult build_envelope(const MatrixMap& t, double tol = kDefaultTol) {
  std::vector<ComplexMatrix> units;
  for (Index i = 0; i < t.domain().rows(); ++i)
    for (Index j = 0; j < t.domain().cols(); ++j) units.push_back(matrix_unit(t.domain(), i, j));
  EnvelopeCore core = envelope_core(units, t.action(), tol);
  if (!core.consistent) return EnvelopeResult{t, std::move(core), t};
  const ComplexMatrix left = core.q.complement(), right = core.p.complement();
  MatrixMap theta = t.sandwich(left, right);
  return EnvelopeResult{t, std::move(core), std::move(theta)};
}

/// q z = q z p = z p on every basis element of Z.
inline CheckReport verify_support_identities(const EnvelopeResult& env, double tol = kDefaultTol) {
  CheckReport rep;
  double r1 = 0.0, r2 = 0.0;
  const ComplexMatrix& p = env.p().matrix();
  const ComplexMatrix& q = env.q().matrix();
  for (const auto& z : env.z().basis()) {
    const ComplexMatrix qzp = q * z * p;
    r1 = std::max(r1, (q * z - qzp).norm());
    r2 = std::max(r2, (qzp - z * p).norm());
  }
  rep.add("qz_eq_qzp", r1, tol);
  rep.add("qzp_eq_zp", r2, tol);
  return rep;
}

/// N is invariant under the left and right actions of Z.
inline CheckReport verify_kernel_ideal(const EnvelopeResult& env, double tol = kDefaultTol) {
  CheckReport rep;
  double worst = 0.0;
  const auto& zb = env.z().basis();
  for (const auto& nn : env.n().basis())
    for (const auto& a : zb)
      for (const auto& b : zb) {
        worst = std::max(worst, env.n().distance(nn * a.adjoint() * b));
        worst = std::max(worst, env.n().distance(a * b.adjoint() * nn));
        worst = std::max(worst, env.n().distance(a * nn.adjoint() * b));
      }
  rep.add("kernel_is_triple_ideal", worst, tol * 100);
  return rep;
}

struct TripleIdentityReport {
  CheckReport checks;
  double unreduced_residual = 0.0;  ///< max ||T(a)T(b)*T(c) - T(ab*c)||, informational
};

/**
 * On random (a, b, c) of unit norm: theta(a b* c) = theta(a) theta(b)* theta(c)
 * and T(a) T(b)* T(c) (1-p) = T(a b* c) (1-p); plus injectivity of theta.
 */
inline TripleIdentityReport verify_theta_triple(const EnvelopeResult& env, Index samples, std::uint64_t seed,
                                                double tol = kDefaultTol) {
  TripleIdentityReport out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const Shape dom = env.t.domain();
  auto rand_unit = [&]() {
    ComplexMatrix x(dom.rows(), dom.cols());
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < x.cols(); ++j) {
        const double re = nd(rng);
        const double im = nd(rng);
        x(i, j) = Complex(re, im);
      }
    return ComplexMatrix(x / op_norm(x));
  };
  const ComplexMatrix cp = env.p().complement();
  double th = 0.0, red = 0.0;
  for (Index k = 0; k < samples; ++k) {
    const ComplexMatrix a = rand_unit(), b = rand_unit(), c = rand_unit();
    const ComplexMatrix abc = a * b.adjoint() * c;
    th = std::max(th, op_norm(env.theta.apply(abc) - env.theta.apply(a) * env.theta.apply(b).adjoint() * env.theta.apply(c)));
    const ComplexMatrix ta = env.t.apply(a), tb = env.t.apply(b), tc = env.t.apply(c), tabc = env.t.apply(abc);
    red = std::max(red, op_norm((ta * tb.adjoint() * tc - tabc) * cp));
    out.unreduced_residual = std::max(out.unreduced_residual, op_norm(ta * tb.adjoint() * tc - tabc));
  }
  out.checks.add("theta_triple_morphism", th, tol);
  out.checks.add("reduced_triple_identity", red, tol);
  const Index rank = numerical_rank(env.theta.coordinate_matrix(), tol);
  out.checks.add("theta_injective", static_cast<double>(dom.size() - rank), 0.0);
  return out;
}

/// The compression a |-> Q* T(a) P onto ran q x ran p, in orthonormal frames.
inline MatrixMap reducing_complement(const EnvelopeResult& env) {
  const ComplexMatrix qf = projection_frame(env.q().matrix());
  const ComplexMatrix pf = projection_frame(env.p().matrix());
  if (qf.cols() == 0 || pf.cols() == 0) {
    throw PreconditionError("reducing_complement: the complement is empty");
  }
  return env.t.sandwich(qf.adjoint(), pf);
}

}  // namespace isolab

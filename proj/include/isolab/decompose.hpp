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
 * @file decompose.hpp
 * @brief Complete isometry verdicts with structural certificates.
 *
 * A complete isometry T splits as T = theta + R where theta = (1-q) T (1-p) is
 * a 1-1 triple morphism and R = q T p is completely contractive.  analyze()
 * either certifies both halves, refutes T with a witness, or reports
 * undecided with diagnostics.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "cbnorm.hpp"
#include "envelope.hpp"
#include "errors.hpp"
#include "linmap.hpp"
#include "numeric.hpp"
#include "report.hpp"

namespace isolab {

enum class Verdict { complete_isometry, not_complete_isometry, undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::complete_isometry:
      return "complete_isometry";
    case Verdict::not_complete_isometry:
      return "not_complete_isometry";
    case Verdict::undecided:
      return "undecided";
  }
  return "undecided";
}

/// Evidence against complete isometry: a domain element at some level.
struct Witness {
  std::string kind;  ///< expansion, deficit, kernel or envelope
  ComplexMatrix x;   ///< element of M_{L m, L n}, unit operator norm
  Index level = 1;
  double ratio = 0.0;  ///< ||T_L(x)|| / ||x||
};

struct AnalyzeOptions {
  double tol = kDefaultTol;   ///< rank and closure threshold
  double check_tol = 1e-8;    ///< identity residuals
  std::uint64_t seed = 20240607;
  Index level = 0;            ///< falsification level; 0 means min(r, s)
  Index trials = 6;
  int max_iters = 5000;
  Index samples = 50;         ///< random triples for the triple identities
};

struct CanonicalForm {
  ComplexMatrix u;  ///< unitary in M_r
  ComplexMatrix v;  ///< unitary in M_s
  std::optional<MatrixMap> s;  ///< lower right corner of U T(.) V; absent when r = m or s = n
  Index multiplicity = 0;      ///< rank of theta(E_11)
  double residual = 0.0;       ///< max_ij ||U T(E_ij) V - diag(E_ij, S(E_ij))||_F
};

struct TripleMorphismFactors {
  ComplexMatrix u;  ///< theta(1): a partial isometry
  MatrixMap pi;     ///< a |-> u* theta(a), a *-homomorphism into M_s
  CheckReport checks;
};

struct Decomposition {
  Verdict verdict = Verdict::undecided;
  std::optional<EnvelopeResult> env;
  std::optional<ComplexMatrix> u;
  std::optional<MatrixMap> pi;
  std::optional<MatrixMap> s;
  std::optional<ComplexMatrix> frame_u, frame_v;
  Index multiplicity = 0;
  std::optional<CcCertificate> complement;  ///< cc certificate of q T p (absent when p or q is 0)
  std::vector<Witness> witnesses;
  std::vector<std::string> diagnostics;
  CheckReport checks;
};

namespace detail {

inline Witness make_witness(const MatrixMap& t, std::string kind, const ComplexMatrix& x, Index level) {
  const double nx = op_norm(x);
  Witness w{std::move(kind), nx > 0.0 ? ComplexMatrix(x / nx) : x, level, 0.0};
  w.ratio = nx > 0.0 ? op_norm(apply_amplified(t, level, w.x)) : 0.0;
  return w;
}

inline std::vector<ComplexMatrix> domain_units(Shape d) {
  std::vector<ComplexMatrix> out;
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = 0; j < d.cols(); ++j) out.push_back(matrix_unit(d, i, j));
  return out;
}

/// max over basis triples of ||theta(a b* c) - theta(a) theta(b)* theta(c)||_F.
inline double basis_triple_residual(const MatrixMap& theta) {
  const auto units = domain_units(theta.domain());
  double worst = 0.0;
  for (const auto& a : units)
    for (const auto& b : units)
      for (const auto& c : units) {
        const ComplexMatrix lhs = theta.apply(a * b.adjoint() * c);
        worst = std::max(worst, (lhs - theta.apply(a) * theta.apply(b).adjoint() * theta.apply(c)).norm());
      }
  return worst;
}

/**
 * Frames for a 1-1 triple morphism theta: with g_{1,t} an orthonormal basis of
 * ran theta(E_11)* theta(E_11), f_{i,t} = theta(E_i1) g_{1,t} and
 * g_{j,t} = theta(E_1j)* f_{1,t}, theta(E_ij) = sum_t f_{i,t} g_{j,t}*.
 * Rows of U are the f_{., 1}, f_{., 2}, ... followed by a complement; columns
 * of V likewise for g.
 */
inline CanonicalForm canonical_frames(const MatrixMap& t, const MatrixMap& theta, double tol) {
  const Index m = t.domain().rows(), n = t.domain().cols();
  const Index r = t.codomain().rows(), s = t.codomain().cols();
  const ComplexMatrix t11 = theta.unit_image(0, 0);
  const ComplexMatrix g1 = range_frame(ComplexMatrix(t11.adjoint() * t11), tol);
  const Index k = g1.cols();
  if (k == 0) throw StructureError("canonical_form: theta(E_11) vanishes");
  if (k * m > r || k * n > s) throw StructureError("canonical_form: multiplicity does not fit the codomain");
  ComplexMatrix f(r, k * m), g(s, k * n);
  for (Index c = 0; c < k; ++c) {
    for (Index i = 0; i < m; ++i) f.col(c * m + i) = theta.unit_image(i, 0) * g1.col(c);
    for (Index j = 0; j < n; ++j) g.col(c * n + j) = theta.unit_image(0, j).adjoint() * f.col(c * m);
  }
  ComplexMatrix wf(r, r), wg(s, s);
  wf << f, complement_frame(f, r);
  wg << g, complement_frame(g, s);
  CanonicalForm out;
  out.u = polar_unitary(wf).adjoint();
  out.v = polar_unitary(wg);
  out.multiplicity = k;
  if (r > m && s > n) {
    out.s = MatrixMap::from_function(t.domain(), Shape(r - m, s - n), [&](const ComplexMatrix& x) {
      return ComplexMatrix((out.u * t.apply(x) * out.v).bottomRightCorner(r - m, s - n));
    });
  }
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      ComplexMatrix expect = ComplexMatrix::Zero(r, s);
      expect(i, j) = 1.0;
      if (out.s) expect.bottomRightCorner(r - m, s - n) = out.s->unit_image(i, j);
      out.residual = std::max(out.residual, (out.u * t.unit_image(i, j) * out.v - expect).norm());
    }
  return out;
}

}  // namespace detail

/**
 * u = theta(1) and pi(a) = u* theta(a) for a 1-1 triple morphism on a square
 * domain; checks that pi is a *-homomorphism with u* u acting as its unit.
 */
inline TripleMorphismFactors factor_triple_morphism(const MatrixMap& theta,
                                                    const std::optional<ComplexMatrix>& unital_element = std::nullopt,
                                                    double tol = 1e-8) {
  if (!theta.domain().square()) throw DimensionError("factor_triple_morphism: domain must be square");
  const double scale = std::max(1.0, theta.action_norm());
  const double triple = detail::basis_triple_residual(theta);
  if (triple > tol * scale) {
    throw StructureError("factor_triple_morphism: not a triple morphism (residual " + std::to_string(triple) + ")");
  }
  const Index m = theta.domain().rows();
  if (numerical_rank(theta.coordinate_matrix(), kDefaultTol) < m * m) {
    throw StructureError("factor_triple_morphism: the triple morphism is not injective");
  }
  const ComplexMatrix u = unital_element ? *unital_element : theta.apply(ComplexMatrix::Identity(m, m));
  const Index s = theta.codomain().cols();
  MatrixMap pi = MatrixMap::from_function(theta.domain(), Shape(s, s), [&](const ComplexMatrix& a) {
    return ComplexMatrix(u.adjoint() * theta.apply(a));
  });
  TripleMorphismFactors out{u, std::move(pi), {}};
  out.checks.add("triple_morphism", triple, tol * scale);
  out.checks.add("u_partial_isometry", partial_isometry_residual(u), tol);
  const auto units = detail::domain_units(theta.domain());
  double mult = 0.0, star = 0.0, unit = 0.0, replay = 0.0;
  const ComplexMatrix uu = u.adjoint() * u;
  for (const auto& a : units) {
    const ComplexMatrix pa = out.pi.apply(a);
    star = std::max(star, (out.pi.apply(a.adjoint()) - pa.adjoint()).norm());
    unit = std::max(unit, (uu * pa - pa).norm());
    replay = std::max(replay, (u * pa - theta.apply(a)).norm());
    for (const auto& b : units) mult = std::max(mult, (out.pi.apply(a * b) - pa * out.pi.apply(b)).norm());
  }
  out.checks.add("pi_multiplicative", mult, tol);
  out.checks.add("pi_preserves_adjoint", star, tol);
  out.checks.add("u_star_u_unit_on_pi", unit, tol);
  out.checks.add("theta_eq_u_pi", replay, tol);
  return out;
}

/**
 * Three-valued complete isometry test.
 *
 * (a) level-1 and level-L falsifier on T; (b) envelope consistency; (c) the
 * triple identities for theta; (d) complete contractivity of the reducing
 * complement q T p.  On success the certificate carries u, pi (square
 * domains) and the frames U, V with the corner S.
 */
inline Decomposition analyze(const MatrixMap& t, const AnalyzeOptions& opt = {}) {
  Decomposition d;
  const Index r = t.codomain().rows(), s = t.codomain().cols();
  const Index level = opt.level > 0 ? opt.level : std::min(r, s);

  {
    const FalsifierResult f1 = amplified_isometry_falsifier(t, 1, opt.trials, opt.seed);
    FalsifierResult best = f1;
    if (!f1.violation(opt.tol) && level > 1) {
      best = amplified_isometry_falsifier(t, level, opt.trials, opt.seed + 1, {*f1.expansion.witness});
    }
    if (best.violation(opt.tol)) {
      d.verdict = Verdict::not_complete_isometry;
      const bool up = best.expansion_found(opt.tol) &&
                      (!best.deficit_found(opt.tol) || best.expansion.lower - 1.0 >= 1.0 - best.min_ratio);
      d.witnesses.push_back(detail::make_witness(t, up ? "expansion" : "deficit", *best.witness(opt.tol), best.level));
      return d;
    }
  }

  try {
    d.env = build_envelope(t, opt.tol);
  } catch (const NonInjectiveError& e) {
    d.verdict = Verdict::not_complete_isometry;
    d.witnesses.push_back(detail::make_witness(t, "kernel", e.kernel_element(), 1));
    return d;
  }
  const EnvelopeResult& env = *d.env;
  if (!env.consistent()) {
    d.verdict = Verdict::not_complete_isometry;
    d.diagnostics.push_back("triple system of the range is inconsistent with the domain (gap " +
                            std::to_string(env.core.inconsistency) + ")");
    if (env.core.witness) d.witnesses.push_back(detail::make_witness(t, "envelope", *env.core.witness, 1));
    return d;
  }

  d.checks.append(verify_support_identities(env, opt.check_tol), "");
  const TripleIdentityReport tri = verify_theta_triple(env, opt.samples, opt.seed, opt.check_tol);
  d.checks.append(tri.checks, "");
  if (!d.checks.passed()) {
    d.verdict = Verdict::undecided;
    d.diagnostics.push_back("theta identities failed (max residual " + std::to_string(d.checks.max_residual()) + ")");
    return d;
  }

  if (env.p().is_zero() || env.q().is_zero()) {
    d.checks.add("t_eq_theta", max_action_distance(t, env.theta), opt.check_tol);
  } else {
    const MatrixMap rest = reducing_complement(env);
    CcOptions cc;
    cc.tol = opt.tol;
    cc.max_iters = opt.max_iters;
    cc.trials = opt.trials;
    cc.seed = opt.seed + 7;
    cc.level = opt.level;
    d.complement = is_completely_contractive(rest, cc);
    if (d.complement->verdict == CcVerdict::certified_no) {
      d.verdict = Verdict::not_complete_isometry;
      d.witnesses.push_back(detail::make_witness(t, "expansion", *d.complement->witness, d.complement->level));
      d.diagnostics.push_back("reducing complement is not completely contractive");
      return d;
    }
    if (d.complement->verdict == CcVerdict::undecided) {
      d.verdict = Verdict::undecided;
      d.diagnostics.push_back("complete contractivity of the reducing complement is undecided (residual " +
                              std::to_string(d.complement->residual) + ")");
      return d;
    }
    d.checks.add("complement_cb_bound", std::max(0.0, d.complement->bound - 1.0), opt.tol);
  }

  if (t.domain().square()) {
    const TripleMorphismFactors fac = factor_triple_morphism(env.theta, std::nullopt, opt.check_tol);
    d.checks.append(fac.checks, "factor.");
    d.u = fac.u;
    d.pi = fac.pi;
    const ComplexMatrix cp = env.p().complement();
    double replay = 0.0;
    for (const auto& a : detail::domain_units(t.domain()))
      replay = std::max(replay, (t.apply(a) * cp - fac.u * fac.pi.apply(a)).norm());
    d.checks.add("t_compressed_eq_u_pi", replay, opt.check_tol);
  }
  const CanonicalForm cf = detail::canonical_frames(t, env.theta, opt.tol);
  d.frame_u = cf.u;
  d.frame_v = cf.v;
  d.s = cf.s;
  d.multiplicity = cf.multiplicity;
  d.checks.add("canonical_form", cf.residual, opt.check_tol);

  d.verdict = d.checks.passed() ? Verdict::complete_isometry : Verdict::undecided;
  if (d.verdict == Verdict::undecided) {
    d.diagnostics.push_back("certificate checks failed (max residual " + std::to_string(d.checks.max_residual()) + ")");
  }
  return d;
}

/// Unitaries U, V with U T(x) V = diag(x, S(x)).
inline CanonicalForm canonical_form(const MatrixMap& t, const AnalyzeOptions& opt = {}) {
  const Decomposition d = analyze(t, opt);
  if (d.verdict != Verdict::complete_isometry) {
    throw PreconditionError(std::string("canonical_form: map is not certified (") + to_string(d.verdict) + ")");
  }
  return detail::canonical_frames(t, d.env->theta, opt.tol);
}

struct UnitalSplit {
  MatrixMap pi;                ///< a |-> F0* T(a) F0 on ran(1 - p)
  std::optional<MatrixMap> s;  ///< a |-> F1* T(a) F1 on ran p; absent when p = 0
  Projection p;
  ComplexMatrix frame;         ///< unitary [F0, F1]
  CheckReport checks;
};

/// T = pi + S for a unital complete isometry on M_n.
inline UnitalSplit unital_split(const MatrixMap& t, const AnalyzeOptions& opt = {}) {
  if (!t.domain().square() || !t.codomain().square()) throw PreconditionError("unital_split: shapes must be square");
  const Index m = t.domain().rows(), r = t.codomain().rows();
  const double unital = (t.apply(ComplexMatrix::Identity(m, m)) - ComplexMatrix::Identity(r, r)).norm();
  if (unital > opt.check_tol) throw PreconditionError("unital_split: T(1) is not the identity");
  const Decomposition d = analyze(t, opt);
  if (d.verdict != Verdict::complete_isometry) {
    throw PreconditionError(std::string("unital_split: map is not certified (") + to_string(d.verdict) + ")");
  }
  const Projection& p = d.env->p();
  const ComplexMatrix f1 = projection_frame(p.matrix());
  const ComplexMatrix f0 = p.is_zero() ? ComplexMatrix(ComplexMatrix::Identity(r, r)) : projection_frame(p.complement());
  ComplexMatrix frame(r, r);
  frame << f0, f1;
  UnitalSplit out{t.sandwich(f0.adjoint(), f0), std::nullopt, p, frame, {}};
  if (f1.cols() > 0) out.s = t.sandwich(f1.adjoint(), f1);
  double off = 0.0;
  for (const auto& a : t.action()) {
    off = std::max(off, (p.matrix() * a * p.complement()).norm());
    off = std::max(off, (p.complement() * a * p.matrix()).norm());
  }
  out.checks.add("off_diagonal_corners", off, opt.check_tol);
  double mult = 0.0;
  const auto units = detail::domain_units(t.domain());
  for (const auto& a : units)
    for (const auto& b : units) mult = std::max(mult, (out.pi.apply(a * b) - out.pi.apply(a) * out.pi.apply(b)).norm());
  out.checks.add("pi_multiplicative", mult, opt.check_tol);
  out.checks.add("pi_unital", (out.pi.apply(ComplexMatrix::Identity(m, m)) -
                               ComplexMatrix::Identity(f0.cols(), f0.cols())).norm(), opt.check_tol);
  if (out.s) {
    const PositivityResult pos = is_completely_positive(*out.s, opt.check_tol);
    out.checks.add("s_choi_min_eigenvalue", std::max(0.0, -pos.min_eigenvalue), opt.check_tol);
    out.checks.add("s_unital", (out.s->apply(ComplexMatrix::Identity(m, m)) -
                                ComplexMatrix::Identity(f1.cols(), f1.cols())).norm(), opt.check_tol);
  }
  return out;
}

enum class UnitaryKind { unitary, isometry, coisometry };

inline const char* to_string(UnitaryKind k) {
  switch (k) {
    case UnitaryKind::unitary:
      return "unitary";
    case UnitaryKind::isometry:
      return "isometry";
    case UnitaryKind::coisometry:
      return "coisometry";
  }
  return "unitary";
}

struct UnitaryCornerReport {
  UnitaryKind kind = UnitaryKind::unitary;
  ComplexMatrix corner;  ///< T(1)(1-p) in frames of ran(1-q) and ran(1-p)
  CheckReport checks;
};

/**
 * If T(a0) is a unitary (isometry, coisometry) then T(1)(1-p) is one of the
 * corner (1-q) M (1-p), and T(.)(1-p) = T(1)(1-p) pi(.).
 */
inline UnitaryCornerReport check_unitary_corner(const MatrixMap& t, const ComplexMatrix& a0, const AnalyzeOptions& opt = {}) {
  if (!t.domain().square()) throw PreconditionError("check_unitary_corner: the domain must be unital (square)");
  const ComplexMatrix ta = t.apply(a0);
  const Index r = t.codomain().rows(), s = t.codomain().cols(), m = t.domain().rows();
  const bool iso = (ta.adjoint() * ta - ComplexMatrix::Identity(s, s)).norm() <= opt.check_tol;
  const bool coiso = (ta * ta.adjoint() - ComplexMatrix::Identity(r, r)).norm() <= opt.check_tol;
  if (!iso && !coiso) throw PreconditionError("check_unitary_corner: T(a0) is neither an isometry nor a coisometry");
  const Decomposition d = analyze(t, opt);
  if (d.verdict != Verdict::complete_isometry) {
    throw PreconditionError(std::string("check_unitary_corner: map is not certified (") + to_string(d.verdict) + ")");
  }
  UnitaryCornerReport out;
  out.kind = iso && coiso ? UnitaryKind::unitary : (iso ? UnitaryKind::isometry : UnitaryKind::coisometry);
  const ComplexMatrix q0 = projection_frame(d.env->q().complement());
  const ComplexMatrix p0 = projection_frame(d.env->p().complement());
  const ComplexMatrix t1 = t.apply(ComplexMatrix::Identity(m, m));
  out.corner = q0.adjoint() * t1 * p0;
  const Index a = out.corner.rows(), b = out.corner.cols();
  if (out.kind != UnitaryKind::coisometry) {
    out.checks.add("corner_isometry", (out.corner.adjoint() * out.corner - ComplexMatrix::Identity(b, b)).norm(),
                   opt.check_tol);
  }
  if (out.kind != UnitaryKind::isometry) {
    out.checks.add("corner_coisometry", (out.corner * out.corner.adjoint() - ComplexMatrix::Identity(a, a)).norm(),
                   opt.check_tol);
  }
  const ComplexMatrix u = t1 * d.env->p().complement();
  double replay = 0.0;
  for (const auto& x : detail::domain_units(t.domain()))
    replay = std::max(replay, (t.apply(x) * d.env->p().complement() - u * d.pi->apply(x)).norm());
  out.checks.add("t_compressed_eq_u_pi", replay, opt.check_tol);
  return out;
}

struct PullbackReport {
  double image_residual = 0.0;   ///< ||T(z) T(z)* T(z) - T(z)||_F
  double domain_residual = 0.0;  ///< ||z z* z - z||_F
  bool image_partial_isometry = false;
  bool domain_partial_isometry = false;
  /// T(z) a partial isometry implies z one.
  bool holds() const { return !image_partial_isometry || domain_partial_isometry; }
};

/// Partial isometries pull back along a certified complete isometry.
inline PullbackReport check_partial_isometry_pullback(const Decomposition& d, const ComplexMatrix& z, double tol = 1e-8) {
  if (d.verdict != Verdict::complete_isometry || !d.env) {
    throw PreconditionError("check_partial_isometry_pullback: the map must be a certified complete isometry");
  }
  PullbackReport out;
  out.image_residual = partial_isometry_residual(d.env->t.apply(z));
  out.domain_residual = partial_isometry_residual(z);
  out.image_partial_isometry = out.image_residual <= tol;
  out.domain_partial_isometry = out.domain_residual <= tol;
  return out;
}

/**
 * Quotient view of the compression: J = M_s p is a left ideal of M_s whose
 * quotient map is x |-> x (1 - e) with e = p, and T(a)(1 - e) = u pi(a).
 */
inline CheckReport verify_quotient_view(const Decomposition& d, double tol = 1e-8) {
  if (d.verdict != Verdict::complete_isometry || !d.u || !d.pi) {
    throw PreconditionError("verify_quotient_view: needs a certified decomposition with u and pi");
  }
  const Index s = d.env->t.codomain().cols();
  const Shape b(s, s);
  MatrixSubspace j(b);
  const ComplexMatrix& p = d.env->p().matrix();
  for (Index r = 0; r < s; ++r)
    for (Index c = 0; c < s; ++c) j.insert(matrix_unit(b, r, c) * p, kDefaultTol, 1.0);
  const QuotientCompression qc = quotient_compression(b, j, MatrixSubspace(b), kDefaultTol);
  CheckReport rep;
  rep.add("quotient_unit_eq_p", (qc.e.matrix() - p).norm(), tol);
  rep.add("quotient_kernel_dim", std::abs(static_cast<double>(qc.kernel_dim - qc.ideal_sum_dim)), 0.0);
  double replay = 0.0;
  for (const auto& a : detail::domain_units(d.env->t.domain()))
    replay = std::max(replay, (d.env->t.apply(a) * qc.e.complement() - *d.u * d.pi->apply(a)).norm());
  rep.add("quotient_eq_u_pi", replay, tol);
  return rep;
}

}  // namespace isolab

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

#include <catch_amalgamated.hpp>

#include <random>

#include "isolab/decompose.hpp"
#include "isolab/nicex.hpp"
#include "oracles.hpp"

namespace isolab {
namespace test_nicex {

static NicexConfig config(Index n, std::vector<double> eps, NicexMode mode = NicexMode::diagonal) {
  NicexConfig c;
  c.n = n;
  c.levels = static_cast<Index>(eps.size());
  c.epsilons = std::move(eps);
  c.mode = mode;
  return c;
}

TEST_CASE("psi on coordinates") {
  const NicexMaps m3 = build_nicex(config(3, {1.0 / 3.0}));
  ComplexVector e1 = ComplexVector::Zero(3);
  e1(0) = 1.0;
  const ComplexVector v = m3.apply_psi(0, e1);
  CHECK(v(0).real() == Catch::Approx(2.0 / 3.0));
  CHECK(v(1).real() == Catch::Approx(1.0 / 6.0));
  CHECK(v(2).real() == Catch::Approx(1.0 / 6.0));
  CHECK(v.cwiseAbs().maxCoeff() >= 1.0 - 2.0 / 3.0);

  const NicexMaps m2 = build_nicex(config(2, {0.25}));
  ComplexVector a(2);
  a << 2.0, -4.0;
  const ComplexVector w = m2.apply_psi(0, a);
  CHECK(w(0).real() == Catch::Approx(0.75 * 2.0 + 0.25 * -4.0));
  CHECK(w(1).real() == Catch::Approx(0.25 * 2.0 + 0.75 * -4.0));

  const NicexMaps d = build_nicex(NicexConfig{});
  for (Index k = 0; k < 4; ++k) {
    const ComplexVector ones = d.apply_psi(k, ComplexVector::Ones(3));
    CHECK((ones - ComplexVector::Ones(3)).norm() <= 1e-15);
    CHECK(d.psi[static_cast<std::size_t>(k)].apply(ComplexMatrix::Identity(3, 3)).isApprox(ComplexMatrix::Identity(3, 3)));
  }
}

TEST_CASE("default epsilons and validation") {
  const NicexConfig c;
  const auto e = c.resolved_epsilons();
  REQUIRE(e.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(e[k] == Catch::Approx(1.0 / double(k + 3)));
  CHECK_THROWS_AS(build_nicex(config(3, {0.2, 0.3})), ConfigError);
  CHECK_THROWS_AS(build_nicex(config(3, {1.2})), ConfigError);
  CHECK_THROWS_AS(build_nicex(config(1, {0.2})), ConfigError);
  CHECK_THROWS_AS(build_nicex(config(3, {2.0 / 3.0})), ConfigError);
  NicexConfig bad;
  bad.epsilons = {0.5, 0.25};
  CHECK_THROWS_AS(build_nicex(bad), ConfigError);
}

TEST_CASE("lower bound on random inputs") {
  const NicexMaps m = build_nicex(config(4, {1.0 / 3, 1.0 / 4, 1.0 / 5, 1.0 / 6, 1.0 / 7}));
  const LowerBoundReport r = lower_bound_check(m, 1000, 7);
  CHECK(r.passed());
  CHECK(r.violations == 0);
  CHECK(r.row_sum_error <= 1e-15);
  CHECK(r.nonnegative);
  CHECK(r.worst_ratio >= 1.0);

  // The constant vector is kept exactly.
  for (Index k = 0; k < 5; ++k) CHECK(m.apply_psi(k, ComplexVector::Ones(4)).cwiseAbs().maxCoeff() == Catch::Approx(1.0));
}

TEST_CASE("Psi is almost isometric at truncation") {
  const NicexMaps m = build_nicex(NicexConfig{});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    for (Index i = 0; i < 3; ++i) a(i, i) = Complex(ud(rng), ud(rng));
    const double na = a.diagonal().cwiseAbs().maxCoeff();
    const double np = oracle::norm2(m.big_psi.apply(a));
    CHECK(np <= na + 1e-12);
    CHECK(np >= (1.0 - 2.0 * m.eps.back()) * na - 1e-12);
  }
}

TEST_CASE("commutant of the diagonal images") {
  for (Index n = 2; n <= 4; ++n) {
    NicexConfig c;
    c.n = n;
    c.levels = 3;
    const NoProjectionReport r = no_projection_check(build_nicex(c), 1e-10, false);
    CHECK(r.commutant_dim == 3 * n);
    CHECK(r.commutant_is_diagonal);
    CHECK_FALSE(r.enumerated);
  }
}

TEST_CASE("only p = 1 survives") {
  SECTION("n = 2, K = 2") {
    const NoProjectionReport r = no_projection_check(build_nicex(config(2, {1.0 / 3, 1.0 / 5})));
    CHECK(r.masks_checked == 16);
    CHECK(r.surviving == 1);
    CHECK(r.only_identity_survives());
  }
  SECTION("n = 3, K = 2") {
    const NoProjectionReport r = no_projection_check(build_nicex(config(3, {1.0 / 3, 1.0 / 5})));
    CHECK(r.masks_checked == 64);
    CHECK(r.only_identity_survives());
  }
  SECTION("defaults") {
    const NoProjectionReport r = no_projection_check(build_nicex(NicexConfig{}));
    CHECK(r.masks_checked == 4096);
    CHECK(r.commutant_dim == 12);
    CHECK(r.only_identity_survives());
  }
  SECTION("matrix mode") {
    NicexConfig c;
    c.mode = NicexMode::matrix;
    const NoProjectionReport r = no_projection_check(build_nicex(c));
    CHECK(r.only_identity_survives());
  }
}

TEST_CASE("the control map keeps every projection") {
  const NoProjectionReport r = no_projection_check(build_control(config(2, {1.0 / 3, 1.0 / 5})));
  CHECK(r.surviving == 16);
  CHECK_FALSE(r.only_identity_survives());
  NicexConfig c;
  c.mode = NicexMode::matrix;
  const NoProjectionReport rm = no_projection_check(build_control(c));
  // Only projections constant on each block commute with the matrix units.
  CHECK(rm.surviving == 16);
}

// Whole-matrix sweep: p = diag(mask) survives when (1-p) Psi(.) commutes with p
// and is a *-homomorphism on all pairs of domain units (diagonal units only in
// diagonal mode).
static std::uint64_t brute_force_survivors(const NicexMaps& m) {
  const Index n = m.config.n, dim = m.big_psi.codomain().rows();
  const bool full = m.config.mode == NicexMode::matrix;
  std::uint64_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dim); ++mask) {
    ComplexMatrix keep = ComplexMatrix::Identity(dim, dim);
    for (Index b = 0; b < dim; ++b)
      if ((mask >> b) & 1U) keep(b, b) = 0.0;
    const auto h = [&](Index i, Index j) { return ComplexMatrix(keep * m.big_psi.unit_image(i, j)); };
    bool ok = true;
    for (Index i = 0; i < n && ok; ++i)
      for (Index j = 0; j < n && ok; ++j) {
        if (!full && i != j) continue;
        const ComplexMatrix y = m.big_psi.unit_image(i, j);
        ok = (keep * y - y * keep).norm() <= 1e-12 && (h(j, i) - h(i, j).adjoint()).norm() <= 1e-12;
        for (Index k = 0; k < n && ok; ++k)
          for (Index l = 0; l < n && ok; ++l) {
            if (!full && k != l) continue;
            const ComplexMatrix prod = j == k ? h(i, l) : ComplexMatrix::Zero(dim, dim);
            ok = (h(i, j) * h(k, l) - prod).norm() <= 1e-12;
          }
      }
    if (ok) ++count;
  }
  return count;
}

TEST_CASE("factored enumeration matches the whole-matrix sweep") {
  NicexConfig m23 = config(2, {1.0 / 3, 1.0 / 4, 1.0 / 5}, NicexMode::matrix);
  for (const NicexMaps& maps : {build_nicex(config(2, {1.0 / 3, 1.0 / 5})), build_nicex(config(3, {1.0 / 3, 1.0 / 5})),
                                build_control(config(2, {1.0 / 3, 1.0 / 5})), build_nicex(m23), build_control(m23)}) {
    const NoProjectionReport r = no_projection_check(maps);
    CHECK(r.surviving == brute_force_survivors(maps));
  }
}

TEST_CASE("enumeration is refused above the limit") {
  NicexConfig c;
  c.n = 5;
  c.levels = 5;
  const NoProjectionReport r = no_projection_check(build_nicex(c));
  CHECK_FALSE(r.enumerated);
  CHECK(r.commutant_dim == 25);
}

TEST_CASE("matrix-mode psi is unital and completely positive") {
  for (Index k = 0; k < 4; ++k) {
    NicexConfig c;
    c.mode = NicexMode::matrix;
    const NicexMaps m = build_nicex(c);
    const MatrixMap& psi = m.psi[static_cast<std::size_t>(k)];
    oracle::Mat choi = oracle::Mat::Zero(9, 9);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) choi.block(i * 3, j * 3, 3, 3) = psi.unit_image(i, j);
    CHECK(oracle::min_eig(choi) >= -1e-12);
  }
}

TEST_CASE("unital split of x -> diag(x, psi_1(x))") {
  NicexConfig c;
  c.mode = NicexMode::matrix;
  const NicexMaps m = build_nicex(c);
  const MatrixMap& psi = m.psi.front();
  const MatrixMap t = MatrixMap::from_function(Shape(3, 3), Shape(6, 6), [&psi](const ComplexMatrix& x) {
    ComplexMatrix y = ComplexMatrix::Zero(6, 6);
    y.topLeftCorner(3, 3) = x;
    y.bottomRightCorner(3, 3) = psi.apply(x);
    return y;
  });
  const UnitalSplit u = unital_split(t);
  CHECK(u.checks.passed());
  REQUIRE(u.s);
  oracle::Mat choi = oracle::Mat::Zero(9, 9);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) choi.block(i * 3, j * 3, 3, 3) = u.s->unit_image(i, j);
  CHECK(oracle::min_eig(choi) >= -1e-10);
  CHECK(u.p.rank() == 3);
}

}  // namespace test_nicex
}  // namespace isolab

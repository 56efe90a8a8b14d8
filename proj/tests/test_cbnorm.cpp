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

#include "isolab/cbnorm.hpp"
#include "isolab/gen.hpp"
#include "oracles.hpp"

namespace isolab {
namespace test_cbnorm {

static MatrixMap depolarizing(Index n) {
  return MatrixMap::from_function(Shape(n, n), Shape(n, n), [n](const ComplexMatrix& x) {
    return ComplexMatrix(x.trace() / double(n) * ComplexMatrix::Identity(n, n));
  });
}

// Generalized Choi matrix [[phi1(E_ij)], [T(E_ij)]; [T(E_ij)]^*, [phi2(E_ij)]].
static ComplexMatrix block_choi(const MatrixMap& phi1, const MatrixMap& t, const MatrixMap& phi2, double c) {
  const Index m = t.domain().rows(), n = t.domain().cols(), r = t.codomain().rows(), s = t.codomain().cols();
  ComplexMatrix b = ComplexMatrix::Zero(m * r + n * s, m * r + n * s);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) b.block(i * r, j * r, r, r) = phi1.unit_image(i, j);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) b.block(m * r + i * s, m * r + j * s, s, s) = phi2.unit_image(i, j);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      b.block(i * r, m * r + j * s, r, s) = c * t.unit_image(i, j);
      b.block(m * r + j * s, i * r, s, r) = c * t.unit_image(i, j).adjoint();
    }
  return b;
}

// Recomputes the certified bound from the recorded data.
static void check_certificate(const MatrixMap& t, const CcCertificate& c) {
  REQUIRE(c.phi1);
  REQUIRE(c.phi2);
  REQUIRE(c.fitted);
  const double cc = 1.0 + c.eta;
  CHECK(oracle::min_eig(block_choi(*c.phi1, *c.fitted, *c.phi2, cc)) >= -1e-10);
  const Index m = t.domain().rows(), n = t.domain().cols();
  const double n1 = oracle::norm2(c.phi1->apply(ComplexMatrix::Identity(m, m)));
  const double n2 = oracle::norm2(c.phi2->apply(ComplexMatrix::Identity(n, n)));
  double fit = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) fit += oracle::norm2(t.unit_image(i, j) - c.fitted->unit_image(i, j));
  CHECK(std::sqrt(n1 * n2) / cc + fit <= c.bound + 1e-12);
  CHECK(c.bound <= 1.0 + 1e-9);
}

TEST_CASE("choi matrix blocks are the unit images") {
  const MatrixMap t = transpose_map(2);
  const ChoiMatrix c = choi_matrix(t);
  CHECK(c.matrix.rows() == 4);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) CHECK((c.block(i, j) - t.unit_image(i, j)).norm() == 0.0);
}

TEST_CASE("complete positivity of standard maps") {
  CHECK(is_completely_positive(MatrixMap::identity(Shape(3, 3))).completely_positive);
  CHECK(is_completely_positive(depolarizing(3)).completely_positive);
  const PositivityResult tr = is_completely_positive(transpose_map(2));
  CHECK_FALSE(tr.completely_positive);
  CHECK(tr.min_eigenvalue == Catch::Approx(-1.0));
  CHECK_THROWS_AS(is_completely_positive(MatrixMap::zero(Shape(1, 2), Shape(2, 2))), DimensionError);
}

TEST_CASE("complete positivity agrees with probing on conjugations and mixtures") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 2;
    const ComplexMatrix k1 = oracle::gaussian(n, n, rng), k2 = oracle::gaussian(n, n, rng);
    const MatrixMap cp = MatrixMap::from_function(Shape(n, n), Shape(n, n), [&](const ComplexMatrix& x) {
      return ComplexMatrix(k1 * x * k1.adjoint() + k2 * x * k2.adjoint());
    });
    CHECK(is_completely_positive(cp, 1e-8).completely_positive);
    const auto f = [&](const ComplexMatrix& x) { return cp.apply(x); };
    CHECK(oracle::probed_min_eigenvalue(f, n, n, 3, 60, rng) >= -1e-10);
  }
  // x |-> (1 - t) tr(x) 1 / n + t x^T is CP exactly when t <= 1 / (n + 1).
  for (const double t : {0.2, 0.3, 0.5, 0.9}) {
    const MatrixMap mix = depolarizing(3) * Complex(1.0 - t) + transpose_map(3) * Complex(t);
    const bool expect = t <= 0.25;
    CHECK(is_completely_positive(mix, 1e-8).completely_positive == expect);
    const auto f = [&](const ComplexMatrix& x) { return mix.apply(x); };
    if (!expect) CHECK(oracle::probed_min_eigenvalue(f, 3, 3, 3, 200, rng) < -1e-8);
  }
}

TEST_CASE("falsifier on the identity finds nothing") {
  for (Index level = 1; level <= 3; ++level) {
    const FalsifierResult f = amplified_isometry_falsifier(MatrixMap::identity(Shape(2, 3)), level, 4, 7);
    CHECK_FALSE(f.violation(1e-9));
    CHECK(f.expansion.lower == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(f.min_ratio == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("falsifier on the transpose") {
  const MatrixMap t = transpose_map(2);
  const FalsifierResult f1 = amplified_isometry_falsifier(t, 1, 6, 1);
  CHECK_FALSE(f1.violation(1e-9));
  const FalsifierResult f2 = amplified_isometry_falsifier(t, 2, 6, 1);
  REQUIRE(f2.expansion_found());
  CHECK(f2.expansion.lower >= 2.0 - 1e-6);
  const ComplexMatrix& w = *f2.expansion.witness;
  CHECK(op_norm(w) == Catch::Approx(1.0));
  CHECK(oracle::norm2(apply_amplified(t, 2, w)) >= 2.0 - 1e-6);
  // Level 3 for M_3: the transpose has cb norm 3.
  const FalsifierResult f3 = amplified_isometry_falsifier(transpose_map(3), 3, 6, 1);
  CHECK(f3.expansion.lower >= 3.0 - 1e-6);
}

TEST_CASE("falsifier finds the deficit of a scaling") {
  const MatrixMap half = MatrixMap::identity(Shape(2, 2)) * Complex(0.5);
  const FalsifierResult f = amplified_isometry_falsifier(half, 1, 4, 3);
  REQUIRE(f.deficit_found());
  CHECK(f.min_ratio == Catch::Approx(0.5));
  CHECK(f.witness_ratio() == Catch::Approx(0.5));
  CHECK((*f.witness() - matrix_unit(Shape(2, 2), 0, 0)).norm() <= 1e-12);
}

TEST_CASE("falsifier catches generated non-contractions at level one") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GenSpec g{1 + Index(seed % 3), 1 + Index(seed / 3 % 3), 2 + Index(seed % 5), 2 + Index(seed % 4), 1, 0.5, seed, 1,
              false};
    const NonContraction nc = random_noncontraction(g, 0.05);
    CHECK(nc.ratio == Catch::Approx(1.05));
    const FalsifierResult f = amplified_isometry_falsifier(nc.map, 1, 6, seed);
    CHECK(f.expansion.lower >= nc.ratio - 1e-9);
    CHECK(oracle::norm2(nc.map.apply(*f.expansion.witness)) >= 1.05 - 1e-9);
  }
}

TEST_CASE("norm profile is monotone in the level") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<ComplexMatrix> action;
    for (int k = 0; k < 4; ++k) action.push_back(oracle::gaussian(2, 2, rng) * 0.3);
    const MatrixMap t(Shape(2, 2), Shape(2, 2), action);
    const auto prof = amplified_norm_profile(t, 3, 3, 1 + trial);
    REQUIRE(prof.size() == 3);
    for (std::size_t k = 1; k < prof.size(); ++k) CHECK(prof[k].expansion.lower >= prof[k - 1].expansion.lower - 1e-12);
    // Lower bounds are attained by the witnesses.
    for (const auto& f : prof) {
      const double q = oracle::norm2(apply_amplified(t, f.level, *f.expansion.witness));
      CHECK(q == Catch::Approx(f.expansion.lower).epsilon(1e-10));
    }
  }
}

TEST_CASE("cc: identity and unitary conjugations are certified by factorization") {
  const CcCertificate c = is_completely_contractive(MatrixMap::identity(Shape(2, 2)));
  CHECK(c.verdict == CcVerdict::certified_yes);
  CHECK(c.method == "haagerup");
  CHECK(c.bound == Catch::Approx(1.0));
  std::mt19937_64 rng(3);
  const ComplexMatrix u = oracle::unitary(3, rng), v = oracle::unitary(2, rng);
  const MatrixMap t = MatrixMap::identity(Shape(3, 2)).sandwich(u, v) * Complex(0.9);
  const CcCertificate c2 = is_completely_contractive(t);
  CHECK(c2.verdict == CcVerdict::certified_yes);
  CHECK(c2.bound <= 0.9 + 1e-9);
}

TEST_CASE("cc: scaled transposes sit exactly at the threshold") {
  const CcCertificate yes = is_completely_contractive(transpose_map(2) * Complex(0.5));
  CHECK(yes.verdict == CcVerdict::certified_yes);
  CHECK(yes.bound <= 1.0 + 1e-9);
  const CcCertificate no = is_completely_contractive(transpose_map(2) * Complex(0.51));
  CHECK(no.verdict == CcVerdict::certified_no);
  REQUIRE(no.witness);
  CHECK(oracle::norm2(apply_amplified(transpose_map(2) * Complex(0.51), no.level, *no.witness)) > 1.0);
  const CcCertificate no1 = is_completely_contractive(transpose_map(2));
  CHECK(no1.verdict == CcVerdict::certified_no);
  CHECK(no1.witness_ratio >= 2.0 - 1e-6);
}

TEST_CASE("cc certificates: the block Choi matrix is positive") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 1 + trial % 3, n = 1 + (trial / 3) % 2, r = 2 + trial % 2, s = 2;
    // Two-term sums of contractions: ||T||_cb <= 0.45 + 0.45.
    std::vector<ComplexMatrix> a, b;
    for (int k = 0; k < 2; ++k) {
      ComplexMatrix x = oracle::gaussian(r, m, rng), y = oracle::gaussian(n, s, rng);
      a.push_back(x / oracle::norm2(x));
      b.push_back(y / oracle::norm2(y));
    }
    const MatrixMap t = MatrixMap::from_function(Shape(m, n), Shape(r, s), [&](const ComplexMatrix& x) {
      return ComplexMatrix(0.45 * (a[0] * x * b[0] + a[1] * x * b[1]));
    });
    const CcCertificate c = is_completely_contractive(t);
    INFO("trial " << trial << " method " << c.method << " bound " << c.bound);
    REQUIRE(c.verdict == CcVerdict::certified_yes);
    CHECK(c.bound <= 1.0 + 1e-9);
    check_certificate(t, c);
  }
}

TEST_CASE("cc: sums of partial isometries need the positivity search") {
  std::mt19937_64 rng(17);
  int searched = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const Index m = 1 + trial % 3, n = 1 + (trial / 3) % 3, r = 2 + trial % 3, s = 2 + trial % 2;
    auto partial = [&](Index rows, Index cols) {
      const Index k = std::min(rows, cols);
      return ComplexMatrix(oracle::unitary(rows, rng).leftCols(k) * oracle::unitary(cols, rng).topRows(k));
    };
    const ComplexMatrix u1 = partial(r, m), u2 = partial(r, m), v1 = partial(n, s), v2 = partial(n, s);
    // ||T||_cb <= 2 * 0.49 < 1, while the factorization read off the
    // realignment can exceed 1.
    const MatrixMap t = MatrixMap::from_function(Shape(m, n), Shape(r, s), [&](const ComplexMatrix& x) {
      return ComplexMatrix(0.49 * (u1 * x * v1 + u2 * x * v2));
    });
    const CcCertificate c = is_completely_contractive(t);
    INFO("trial " << trial << " method " << c.method << " bound " << c.bound);
    REQUIRE(c.verdict == CcVerdict::certified_yes);
    check_certificate(t, c);
    if (c.method == "block_positivity") ++searched;
  }
  CHECK(searched >= 1);
}

TEST_CASE("cc: options and edge cases") {
  // Without the falsifier a non-contraction is never certified.
  CcOptions opt;
  opt.run_falsifier = false;
  opt.max_iters = 300;
  const CcCertificate c = is_completely_contractive(transpose_map(2) * Complex(0.8), opt);
  CHECK(c.verdict != CcVerdict::certified_yes);
  // The zero map is completely contractive.
  const CcCertificate z = is_completely_contractive(MatrixMap::zero(Shape(2, 2), Shape(3, 1)));
  CHECK(z.verdict == CcVerdict::certified_yes);
  CHECK(std::string(to_string(CcVerdict::undecided)) == "undecided");
}

}  // namespace test_cbnorm
}  // namespace isolab

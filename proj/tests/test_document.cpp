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

#include <limits>
#include <random>
#include <string>

#include "isolab/document.hpp"
#include "isolab/gen.hpp"
#include "isolab/linmap.hpp"

namespace isolab {
namespace test_document {

using io::ParseError;

static ParseError parse_error_of(const std::string& text) {
  try {
    io::parse_document(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("document parsed without error:\n" << text);
  return ParseError("", 0, 0);
}

TEST_CASE("sha256 known vectors") {
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("map documents round trip losslessly") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  std::vector<ComplexMatrix> images;
  for (int k = 0; k < 6; ++k) {
    ComplexMatrix y(3, 4);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 4; ++j) y(i, j) = Complex(nd(rng), nd(rng)) * 1e-7;
    images.push_back(y);
  }
  images[1](0, 0) = Complex(0.1, -1.0 / 3.0);
  const io::MapDocument d{MatrixMap(Shape(2, 3), Shape(3, 4), images), "x", Verdict::undecided,
                          io::json{{"seed", 7}}};
  const std::string text = io::to_json(d).dump(2);
  const io::Document back = io::parse_document(text);
  const auto* m = std::get_if<io::MapDocument>(&back);
  REQUIRE(m);
  CHECK(m->name == "x");
  CHECK(m->expected_verdict == Verdict::undecided);
  CHECK(m->ground_truth == io::json{{"seed", 7}});
  REQUIRE(m->map.domain() == Shape(2, 3));
  REQUIRE(m->map.codomain() == Shape(3, 4));
  for (std::size_t k = 0; k < images.size(); ++k) CHECK(m->map.action()[k] == images[k]);
  CHECK(io::to_json(*m).dump(2) == text);
}

TEST_CASE("commutative documents round trip") {
  ComplexMatrix rows(3, 2);
  rows << 1.0, 0.0, 0.0, Complex(0.0, -1.0), 0.25, 0.5;
  const io::CommutativeDocument d{CommutativeMap(rows), "", true};
  const io::Document back = io::parse_document(io::to_json(d).dump());
  const auto* c = std::get_if<io::CommutativeDocument>(&back);
  REQUIRE(c);
  CHECK(c->map.k1 == 2);
  CHECK(c->map.k2 == 3);
  CHECK(c->map.matrix == rows);
  CHECK(c->expected_isometry == true);
}

TEST_CASE("syntax errors carry line and column") {
  const ParseError e = parse_error_of("{\n  \"version\": 1,\n  \"kind\": \"map\"\n  \"domain\": [1, 1]\n}");
  CHECK(e.line() == 4);
  CHECK(e.column() >= 3);
  CHECK(std::string(e.what()).rfind("4:", 0) == 0);
  CHECK(parse_error_of("").line() == 1);
}

TEST_CASE("semantic errors point at the offending value") {
  SECTION("short complex entry") {
    const std::string text =
        "{\"version\": 1, \"kind\": \"map\", \"domain\": [1, 1], \"codomain\": [1, 1],\n"
        " \"action\": [[[[1.0, 0.0]]]],\n"
        " \"metadata\": {\"expected_verdict\": \"maybe\"}}";
    const ParseError e = parse_error_of(text);
    CHECK(e.pointer() == "/metadata/expected_verdict");
    CHECK(e.line() == 3);
    CHECK(e.column() == 35);
  }
  SECTION("wrong entry arity") {
    const std::string text =
        "{\"version\": 1, \"kind\": \"map\", \"domain\": [1, 1], \"codomain\": [1, 2],\n"
        " \"action\": [[[[1.0, 0.0], [2.0]]]]}";
    const ParseError e = parse_error_of(text);
    CHECK(e.pointer() == "/action/0/0/1");
    CHECK(e.line() == 2);
    CHECK(e.column() == 27);
  }
  SECTION("wrong number of images") {
    const ParseError e = parse_error_of(
        "{\"version\": 1, \"kind\": \"map\", \"domain\": [1, 2], \"codomain\": [1, 1], \"action\": [[[[1, 0]]]]}");
    CHECK(e.pointer() == "/action");
    CHECK(e.line() == 1);
  }
  SECTION("version, kind and shapes") {
    CHECK(parse_error_of("{\"version\": 2, \"kind\": \"map\"}").pointer() == "/version");
    CHECK(parse_error_of("{\"version\": 1, \"kind\": \"graph\"}").pointer() == "/kind");
    // A missing member is reported at its parent.
    CHECK(parse_error_of("{\"version\": 1}").pointer() == "");
    CHECK(std::string(parse_error_of("{\"version\": 1}").what()).find("missing member \"kind\"") != std::string::npos);
    CHECK(parse_error_of("[1, 2]").line() == 1);
    CHECK(parse_error_of("{\"version\": 1, \"kind\": \"map\", \"domain\": [0, 1]}").pointer() == "/domain/0");
    CHECK(parse_error_of("{\"version\": 1, \"kind\": \"commutative\", \"k1\": 2, \"k2\": 1, \"rows\": [[[1, 0]]]}")
              .pointer()
              .rfind("/rows", 0) == 0);
  }
}

TEST_CASE("nonfinite numbers are encoded as strings") {
  CHECK(io::number_to_json(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::number_to_json(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(io::number_to_json(std::nan("")) == "nan");
  CHECK(std::isinf(io::number_from_json("inf")));
  CHECK(std::isnan(io::number_from_json("nan")));
  CHECK(io::number_from_json(0.5) == 0.5);
  CHECK_THROWS_AS(io::number_from_json("half"), Error);
}

TEST_CASE("reports round trip and digests are stable") {
  SECTION("certified") {
    const auto [t, gt] = random_complete_isometry(GenSpec{2, 2, 4, 4, 1, 0.5, 21, 1, false});
    AnalyzeOptions opt;
    const io::Report a = io::make_report(analyze(t, opt), io::sha256_hex("doc"), opt);
    const io::Report b = io::make_report(analyze(t, opt), io::sha256_hex("doc"), opt);
    REQUIRE(a.verdict == "complete_isometry");
    REQUIRE(a.p);
    CHECK(io::report_digest(a) == io::report_digest(b));
    const io::Report back = io::report_from_json(io::json::parse(io::to_json(a).dump()));
    CHECK(back == a);
    io::Report timed = a;
    timed.timing_ms = 123.0;
    CHECK(io::report_digest(timed) == io::report_digest(a));
    io::Report other = a;
    other.seed += 1;
    CHECK(io::report_digest(other) != io::report_digest(a));
  }
  SECTION("refuted, with an infinite ratio") {
    AnalyzeOptions opt;
    io::Report a = io::make_report(analyze(MatrixMap::zero(Shape(1, 2), Shape(2, 2)), opt), "00", opt);
    a.witnesses.push_back(io::WitnessRecord{"kernel", 1, std::numeric_limits<double>::infinity(),
                                            ComplexMatrix::Identity(1, 2)});
    a.residuals.push_back(Check{"nan_check", std::nan(""), 1e-9, false});
    const io::Report back = io::report_from_json(io::json::parse(io::to_json(a).dump()));
    CHECK(back == a);
    CHECK(back.verdict == "not_complete_isometry");
  }
  CHECK_THROWS_AS(io::report_from_json(io::json{{"version", 1}, {"kind", "map"}}), Error);
}

}  // namespace test_document
}  // namespace isolab

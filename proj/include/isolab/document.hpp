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
 * @file document.hpp
 * @brief JSON map documents and analysis reports.
 *
 * Complex scalars are [re, im] pairs and matrices are arrays of rows.  A map
 * document stores T(E_ij) for the matrix units in row-major order.  Every
 * document carries "version"; schema/isolab.schema.json describes all kinds.
 *
 * Errors in a document are reported with the line and column of the
 * offending value, found by walking the text along the value's JSON pointer.
 */

#pragma once

#include <openssl/evp.h>

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "decompose.hpp"
#include "errors.hpp"
#include "holsztynski.hpp"
#include "linmap.hpp"

namespace isolab {
namespace io {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

#ifdef ISOLAB_VERSION
inline constexpr const char* kToolVersion = ISOLAB_VERSION;
#else
inline constexpr const char* kToolVersion = "0.0.0";
#endif

/// Malformed document: syntax or structure.  line/column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column, std::string pointer = "")
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column),
        pointer_(std::move(pointer)) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& pointer() const { return pointer_; }

 private:
  std::size_t line_, column_;
  std::string pointer_;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

/// Minimal scanner that finds where the value at a JSON pointer starts.
class Locator {
 public:
  explicit Locator(std::string_view s) : s_(s) {}

  std::size_t find(const json::json_pointer& ptr) {
    std::vector<std::string> tokens;
    json::json_pointer p = ptr;
    while (!p.empty()) {
      tokens.insert(tokens.begin(), p.back());
      p.pop_back();
    }
    i_ = 0;
    ws();
    for (const auto& tok : tokens) {
      const std::size_t here = i_;
      if (!descend(tok)) return here;
      ws();
    }
    return i_;
  }

 private:
  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\n' || s_[i_] == '\r' || s_[i_] == '\t')) ++i_;
  }

  std::string string() {
    std::string out;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') ++i_;
      if (i_ < s_.size()) out.push_back(s_[i_++]);
    }
    ++i_;
    return out;
  }

  void skip() {
    ws();
    if (i_ >= s_.size()) return;
    if (s_[i_] == '"') {
      string();
      return;
    }
    if (s_[i_] == '{' || s_[i_] == '[') {
      int depth = 0;
      while (i_ < s_.size()) {
        const char c = s_[i_];
        if (c == '"') {
          string();
          continue;
        }
        if (c == '{' || c == '[') ++depth;
        if (c == '}' || c == ']') --depth;
        ++i_;
        if (depth == 0) return;
      }
      return;
    }
    while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '}') ++i_;
  }

  bool descend(const std::string& tok) {
    if (i_ >= s_.size()) return false;
    if (s_[i_] == '{') {
      ++i_;
      for (;;) {
        ws();
        if (i_ >= s_.size() || s_[i_] != '"') return false;
        const std::string key = string();
        ws();
        if (i_ >= s_.size() || s_[i_] != ':') return false;
        ++i_;
        ws();
        if (key == tok) return true;
        skip();
        ws();
        if (i_ >= s_.size() || s_[i_] != ',') return false;
        ++i_;
      }
    }
    if (s_[i_] == '[') {
      ++i_;
      std::size_t want = 0;
      try {
        want = std::stoul(tok);
      } catch (...) {
        return false;
      }
      for (std::size_t k = 0;; ++k) {
        ws();
        if (k == want) return i_ < s_.size() && s_[i_] != ']';
        skip();
        ws();
        if (i_ >= s_.size() || s_[i_] != ',') return false;
        ++i_;
      }
    }
    return false;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Structural checks over a parsed JSON value, raising located ParseErrors.
class Reader {
 public:
  Reader(std::string_view text, json root) : text_(text), root_(std::move(root)) {}

  const json& root() const { return root_; }

  [[noreturn]] void fail(const json::json_pointer& at, const std::string& what) const {
    const std::size_t off = detail::Locator(text_).find(at);
    const auto [line, col] = detail::line_column(text_, off);
    throw ParseError(what + " at " + (at.empty() ? std::string("/") : at.to_string()), line, col, at.to_string());
  }

  const json& get(const json::json_pointer& at) const {
    if (!root_.contains(at)) fail(parent_of(at), "missing member \"" + at.back() + "\"");
    return root_.at(at);
  }

  Index positive_int(const json::json_pointer& at) const {
    const json& v = get(at);
    if (!v.is_number_integer() || v.get<long long>() < 1) fail(at, "expected a positive integer");
    return static_cast<Index>(v.get<long long>());
  }

  double number(const json::json_pointer& at) const {
    const json& v = get(at);
    if (!v.is_number()) fail(at, "expected a number");
    return v.get<double>();
  }

  std::string string(const json::json_pointer& at) const {
    const json& v = get(at);
    if (!v.is_string()) fail(at, "expected a string");
    return v.get<std::string>();
  }

  Shape shape(const json::json_pointer& at) const {
    const json& v = get(at);
    if (!v.is_array() || v.size() != 2) fail(at, "expected a shape [rows, cols]");
    return Shape(positive_int(at / 0), positive_int(at / 1));
  }

  Complex scalar(const json::json_pointer& at) const {
    const json& v = get(at);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(at, "expected a complex scalar [re, im]");
    }
    return Complex(v[0].get<double>(), v[1].get<double>());
  }

  ComplexMatrix matrix(const json::json_pointer& at, Index rows, Index cols) const {
    const json& v = get(at);
    if (!v.is_array() || static_cast<Index>(v.size()) != rows) {
      fail(at, "expected " + std::to_string(rows) + " rows");
    }
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      const auto row = at / static_cast<std::size_t>(i);
      const json& r = root_.at(row);
      if (!r.is_array() || static_cast<Index>(r.size()) != cols) {
        fail(row, "expected " + std::to_string(cols) + " entries");
      }
      for (Index j = 0; j < cols; ++j) m(i, j) = scalar(row / static_cast<std::size_t>(j));
    }
    return m;
  }

  /// Square or rectangular matrix whose shape is read from the data.
  ComplexMatrix any_matrix(const json::json_pointer& at) const {
    const json& v = get(at);
    if (!v.is_array() || v.empty() || !v[0].is_array()) fail(at, "expected a nonempty matrix");
    return matrix(at, static_cast<Index>(v.size()), static_cast<Index>(v[0].size()));
  }

 private:
  static json::json_pointer parent_of(const json::json_pointer& p) { return p.empty() ? p : p.parent_pointer(); }

  std::string_view text_;
  json root_;
};

inline Reader read_json(std::string_view text) {
  try {
    return Reader(text, json::parse(text.begin(), text.end()));
  } catch (const json::parse_error& e) {
    const std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = detail::line_column(text, off);
    std::string what = e.what();
    // Drop the library's own position prefix.
    const auto pos = what.find("syntax error");
    throw ParseError(pos == std::string::npos ? what : what.substr(pos), line, col);
  }
}

// ---------------------------------------------------------------------------
// Encoding helpers.

/// Nonfinite doubles are written as "inf", "-inf" or "nan".
inline json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double number_from_json(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error("expected a number");
}

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const json& v) {
  const Index rows = static_cast<Index>(v.size());
  const Index cols = rows > 0 ? static_cast<Index>(v[0].size()) : 0;
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      const json& z = v.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
      m(i, j) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
    }
  return m;
}

inline json action_to_json(const MatrixMap& t) {
  json a = json::array();
  for (const auto& y : t.action()) a.push_back(matrix_to_json(y));
  return a;
}

inline json shape_to_json(const Shape& s) { return json::array({s.rows(), s.cols()}); }

// ---------------------------------------------------------------------------
// Documents.

struct MapDocument {
  MatrixMap map = MatrixMap::zero(Shape(1, 1), Shape(1, 1));
  std::string name;
  std::optional<Verdict> expected_verdict;
  json ground_truth;  ///< free-form generator data; null when absent
};

struct CommutativeDocument {
  CommutativeMap map;
  std::string name;
  std::optional<bool> expected_isometry;
};

using Document = std::variant<MapDocument, CommutativeDocument>;

inline std::optional<Verdict> verdict_from_string(const std::string& s) {
  for (const Verdict v : {Verdict::complete_isometry, Verdict::not_complete_isometry, Verdict::undecided})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

inline json to_json(const MapDocument& d) {
  json j;
  j["version"] = kFormatVersion;
  j["kind"] = "map";
  j["domain"] = shape_to_json(d.map.domain());
  j["codomain"] = shape_to_json(d.map.codomain());
  j["action"] = action_to_json(d.map);
  json meta = json::object();
  if (!d.name.empty()) meta["name"] = d.name;
  if (d.expected_verdict) meta["expected_verdict"] = to_string(*d.expected_verdict);
  if (!d.ground_truth.is_null()) meta["ground_truth"] = d.ground_truth;
  if (!meta.empty()) j["metadata"] = meta;
  return j;
}

inline json to_json(const CommutativeDocument& d) {
  json j;
  j["version"] = kFormatVersion;
  j["kind"] = "commutative";
  j["k1"] = d.map.k1;
  j["k2"] = d.map.k2;
  j["rows"] = matrix_to_json(d.map.matrix);
  json meta = json::object();
  if (!d.name.empty()) meta["name"] = d.name;
  if (d.expected_isometry) meta["expected_isometry"] = *d.expected_isometry;
  if (!meta.empty()) j["metadata"] = meta;
  return j;
}

inline Document parse_document(std::string_view text) {
  const Reader r = read_json(text);
  using P = json::json_pointer;
  if (!r.root().is_object()) r.fail(P(""), "expected a JSON object");
  const json& version = r.get(P("/version"));
  if (!version.is_number_integer() || version.get<long long>() != kFormatVersion) {
    r.fail(P("/version"), "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
  }
  const std::string kind = r.string(P("/kind"));
  std::string name;
  if (r.root().contains(P("/metadata/name"))) name = r.string(P("/metadata/name"));
  if (kind == "map") {
    const Shape dom = r.shape(P("/domain")), cod = r.shape(P("/codomain"));
    const json& action = r.get(P("/action"));
    if (!action.is_array() || static_cast<Index>(action.size()) != dom.size()) {
      r.fail(P("/action"), "expected " + std::to_string(dom.size()) + " images, one per matrix unit");
    }
    std::vector<ComplexMatrix> images;
    for (std::size_t k = 0; k < action.size(); ++k) images.push_back(r.matrix(P("/action") / k, cod.rows(), cod.cols()));
    MapDocument d{MatrixMap(dom, cod, std::move(images)), name, std::nullopt, nullptr};
    if (r.root().contains(P("/metadata/expected_verdict"))) {
      const auto v = verdict_from_string(r.string(P("/metadata/expected_verdict")));
      if (!v) r.fail(P("/metadata/expected_verdict"), "unknown verdict");
      d.expected_verdict = v;
    }
    if (r.root().contains(P("/metadata/ground_truth"))) d.ground_truth = r.get(P("/metadata/ground_truth"));
    return d;
  }
  if (kind == "commutative") {
    const Index k1 = r.positive_int(P("/k1")), k2 = r.positive_int(P("/k2"));
    CommutativeDocument d{CommutativeMap(r.matrix(P("/rows"), k2, k1)), name, std::nullopt};
    if (r.root().contains(P("/metadata/expected_isometry"))) {
      const json& v = r.get(P("/metadata/expected_isometry"));
      if (!v.is_boolean()) r.fail(P("/metadata/expected_isometry"), "expected a boolean");
      d.expected_isometry = v.get<bool>();
    }
    return d;
  }
  r.fail(P("/kind"), "unknown document kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// Reports.

struct WitnessRecord {
  std::string kind;
  Index level = 1;
  double ratio = 0.0;
  ComplexMatrix x;
  bool operator==(const WitnessRecord&) const = default;
};

struct Report {
  std::string tool_version = kToolVersion;
  std::string input_digest;
  std::string verdict;
  std::optional<ComplexMatrix> p, q, u, frame_u, frame_v;
  std::optional<std::vector<ComplexMatrix>> pi, s;  ///< actions on matrix units
  Index multiplicity = 0;
  std::optional<std::string> complement_method;
  std::optional<double> complement_bound;
  std::vector<WitnessRecord> witnesses;
  std::vector<Check> residuals;
  std::vector<std::string> diagnostics;
  double tol = kDefaultTol;
  std::uint64_t seed = 0;
  Index level = 0;
  double timing_ms = 0.0;
};

inline bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

inline bool operator==(const Report& a, const Report& b) {
  if (a.residuals.size() != b.residuals.size()) return false;
  for (std::size_t i = 0; i < a.residuals.size(); ++i) {
    const Check &x = a.residuals[i], &y = b.residuals[i];
    if (x.name != y.name || !same_double(x.residual, y.residual) || !same_double(x.tolerance, y.tolerance) ||
        x.passed != y.passed) {
      return false;
    }
  }
  return a.tool_version == b.tool_version && a.input_digest == b.input_digest && a.verdict == b.verdict &&
         a.p == b.p && a.q == b.q && a.u == b.u && a.frame_u == b.frame_u && a.frame_v == b.frame_v &&
         a.pi == b.pi && a.s == b.s && a.multiplicity == b.multiplicity &&
         a.complement_method == b.complement_method && a.complement_bound == b.complement_bound &&
         a.witnesses == b.witnesses && a.diagnostics == b.diagnostics && same_double(a.tol, b.tol) &&
         a.seed == b.seed && a.level == b.level && same_double(a.timing_ms, b.timing_ms);
}

inline Report make_report(const Decomposition& d, const std::string& input_digest, const AnalyzeOptions& opt) {
  Report r;
  r.input_digest = input_digest;
  r.verdict = to_string(d.verdict);
  if (d.env && d.env->consistent()) {
    r.p = d.env->p().matrix();
    r.q = d.env->q().matrix();
  }
  r.u = d.u;
  r.frame_u = d.frame_u;
  r.frame_v = d.frame_v;
  if (d.pi) r.pi = d.pi->action();
  if (d.s) r.s = d.s->action();
  r.multiplicity = d.multiplicity;
  if (d.complement) {
    r.complement_method = d.complement->method;
    r.complement_bound = d.complement->bound;
  }
  for (const auto& w : d.witnesses) r.witnesses.push_back(WitnessRecord{w.kind, w.level, w.ratio, w.x});
  r.residuals = d.checks.checks;
  r.diagnostics = d.diagnostics;
  r.tol = opt.tol;
  r.seed = opt.seed;
  r.level = opt.level;
  return r;
}

inline json to_json(const Report& r, bool with_timing = true) {
  json j;
  j["version"] = kFormatVersion;
  j["kind"] = "report";
  j["tool_version"] = r.tool_version;
  j["input_digest"] = r.input_digest;
  j["verdict"] = r.verdict;
  json cert = json::object();
  const auto put = [&cert](const char* key, const std::optional<ComplexMatrix>& m) {
    if (m) cert[key] = matrix_to_json(*m);
  };
  put("p", r.p);
  put("q", r.q);
  put("u", r.u);
  put("frame_u", r.frame_u);
  put("frame_v", r.frame_v);
  const auto put_action = [&cert](const char* key, const std::optional<std::vector<ComplexMatrix>>& a) {
    if (!a) return;
    json arr = json::array();
    for (const auto& y : *a) arr.push_back(matrix_to_json(y));
    cert[key] = std::move(arr);
  };
  put_action("pi", r.pi);
  put_action("s", r.s);
  cert["multiplicity"] = r.multiplicity;
  if (r.complement_method) cert["complement_method"] = *r.complement_method;
  if (r.complement_bound) cert["complement_bound"] = number_to_json(*r.complement_bound);
  j["certificate"] = std::move(cert);
  json ws = json::array();
  for (const auto& w : r.witnesses) {
    ws.push_back({{"kind", w.kind}, {"level", w.level}, {"ratio", number_to_json(w.ratio)}, {"x", matrix_to_json(w.x)}});
  }
  j["witnesses"] = std::move(ws);
  json res = json::array();
  for (const auto& c : r.residuals) {
    res.push_back({{"name", c.name},
                   {"residual", number_to_json(c.residual)},
                   {"tolerance", number_to_json(c.tolerance)},
                   {"passed", c.passed}});
  }
  j["residuals"] = std::move(res);
  j["diagnostics"] = r.diagnostics;
  j["options"] = {{"tol", r.tol}, {"seed", r.seed}, {"level", r.level}};
  if (with_timing) j["timing_ms"] = r.timing_ms;
  return j;
}

inline Report report_from_json(const json& j) {
  if (j.at("version").get<int>() != kFormatVersion || j.at("kind").get<std::string>() != "report") {
    throw Error("report_from_json: not a version " + std::to_string(kFormatVersion) + " report");
  }
  Report r;
  r.tool_version = j.at("tool_version").get<std::string>();
  r.input_digest = j.at("input_digest").get<std::string>();
  r.verdict = j.at("verdict").get<std::string>();
  const json& cert = j.at("certificate");
  const auto get = [&cert](const char* key, std::optional<ComplexMatrix>& m) {
    if (cert.contains(key)) m = matrix_from_json(cert.at(key));
  };
  get("p", r.p);
  get("q", r.q);
  get("u", r.u);
  get("frame_u", r.frame_u);
  get("frame_v", r.frame_v);
  const auto get_action = [&cert](const char* key, std::optional<std::vector<ComplexMatrix>>& a) {
    if (!cert.contains(key)) return;
    a.emplace();
    for (const auto& y : cert.at(key)) a->push_back(matrix_from_json(y));
  };
  get_action("pi", r.pi);
  get_action("s", r.s);
  r.multiplicity = cert.at("multiplicity").get<Index>();
  if (cert.contains("complement_method")) r.complement_method = cert.at("complement_method").get<std::string>();
  if (cert.contains("complement_bound")) r.complement_bound = number_from_json(cert.at("complement_bound"));
  for (const auto& w : j.at("witnesses")) {
    r.witnesses.push_back(WitnessRecord{w.at("kind").get<std::string>(), w.at("level").get<Index>(),
                                        number_from_json(w.at("ratio")), matrix_from_json(w.at("x"))});
  }
  for (const auto& c : j.at("residuals")) {
    r.residuals.push_back(Check{c.at("name").get<std::string>(), number_from_json(c.at("residual")),
                                number_from_json(c.at("tolerance")), c.at("passed").get<bool>()});
  }
  r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  const json& o = j.at("options");
  r.tol = o.at("tol").get<double>();
  r.seed = o.at("seed").get<std::uint64_t>();
  r.level = o.at("level").get<Index>();
  if (j.contains("timing_ms")) r.timing_ms = j.at("timing_ms").get<double>();
  return r;
}

/// Digest of the report without its timing, stable for fixed inputs and options.
inline std::string report_digest(const Report& r) { return sha256_hex(to_json(r, false).dump()); }

}  // namespace io
}  // namespace isolab

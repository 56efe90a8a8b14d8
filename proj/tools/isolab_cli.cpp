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

// isolab command line: analyze, holsztynski, nicex, gen.
//
// Exit codes
//   analyze      0 complete isometry, 1 not, 2 undecided
//   holsztynski  0 isometry, 1 not, 65 document is not commutative
//   nicex        0 expected outcome, 1 unexpected, 3 enumeration refused
//   gen          0 written
//   all          64 usage or document errors, 66 unreadable input,
//                73 unwritable output, 70 internal errors

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "isolab/document.hpp"
#include "isolab/gen.hpp"
#include "isolab/isolab.hpp"

namespace {

using isolab::Index;
using isolab::io::json;

constexpr int kExitUsage = 64;
constexpr int kExitNotCommutative = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitSoftware = 70;
constexpr int kExitCantCreate = 73;
constexpr int kExitRefused = 3;

/// Carries an exit code out of a command.
struct Exit {
  int code;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "isolab: cannot read " << path << "\n";
    throw Exit{kExitNoInput};
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    std::cerr << "isolab: cannot write " << path << "\n";
    throw Exit{kExitCantCreate};
  }
}

isolab::io::Document load(const std::string& path, const std::string& text) {
  try {
    return isolab::io::parse_document(text);
  } catch (const isolab::io::ParseError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    throw Exit{kExitUsage};
  } catch (const isolab::Error& e) {
    std::cerr << path << ": " << e.what() << "\n";
    throw Exit{kExitUsage};
  }
}

int verdict_code(isolab::Verdict v) {
  switch (v) {
    case isolab::Verdict::complete_isometry:
      return 0;
    case isolab::Verdict::not_complete_isometry:
      return 1;
    case isolab::Verdict::undecided:
      return 2;
  }
  return 2;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << x;
  return os.str();
}

Index projection_rank(const std::optional<isolab::ComplexMatrix>& p) {
  return p ? static_cast<Index>(std::lround(p->trace().real())) : -1;
}

void print_human(std::ostream& os, const std::string& path, const isolab::io::Report& r) {
  os << path << ": " << r.verdict << "\n";
  if (r.p) os << "  p rank " << projection_rank(r.p) << ", q rank " << projection_rank(r.q) << "\n";
  if (r.multiplicity > 0) os << "  multiplicity " << r.multiplicity << "\n";
  if (r.u) os << "  u is " << r.u->rows() << " x " << r.u->cols() << (r.pi ? ", pi present" : "") << "\n";
  if (r.s) os << "  S acts into " << r.s->front().rows() << " x " << r.s->front().cols() << "\n";
  if (r.complement_method) os << "  complement certified by " << *r.complement_method << ", bound " << fmt(*r.complement_bound) << "\n";
  for (const auto& w : r.witnesses) {
    os << "  witness (" << w.kind << ") at level " << w.level << ": ratio " << std::setprecision(12) << w.ratio << "\n";
  }
  if (!r.residuals.empty()) {
    os << "  residuals:\n";
    for (const auto& c : r.residuals) {
      os << "    " << std::left << std::setw(34) << c.name << " " << fmt(c.residual) << " <= " << fmt(c.tolerance)
         << (c.passed ? "" : "  FAILED") << "\n";
    }
  }
  for (const auto& d : r.diagnostics) os << "  note: " << d << "\n";
  os << "  digest " << r.input_digest.substr(0, 16) << ", " << std::fixed << std::setprecision(1) << r.timing_ms
     << " ms\n";
  os.unsetf(std::ios::floatfield);
}

struct AnalyzeArgs {
  std::string input, dir, out, format = "human";
  double tol = isolab::kDefaultTol;
  std::uint64_t seed = 20240607;
  Index level = 0;
  int max_iters = 5000;
};

isolab::AnalyzeOptions options_of(const AnalyzeArgs& a) {
  isolab::AnalyzeOptions opt;
  opt.tol = a.tol;
  opt.seed = a.seed;
  opt.level = a.level;
  opt.max_iters = a.max_iters;
  return opt;
}

// Analysis of one map document; commutative documents go through the
// diagonal envelope test.
isolab::io::Report analyze_document(const isolab::io::Document& doc, const std::string& text,
                                    const isolab::AnalyzeOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  isolab::io::Report r;
  if (const auto* m = std::get_if<isolab::io::MapDocument>(&doc)) {
    r = isolab::io::make_report(isolab::analyze(m->map, opt), isolab::io::sha256_hex(text), opt);
  } else {
    const auto& c = std::get<isolab::io::CommutativeDocument>(doc);
    const isolab::DiagonalAnalysis d = isolab::analyze_diagonal(c.map, opt.tol);
    r.input_digest = isolab::io::sha256_hex(text);
    r.verdict = isolab::to_string(d.verdict);
    r.residuals.push_back(isolab::Check{"contractive", d.contractive ? 0.0 : 1.0, 0.0, d.contractive});
    r.residuals.push_back(isolab::Check{"injective", d.injective ? 0.0 : 1.0, 0.0, d.injective});
    if (d.contractive && d.injective) r.residuals.push_back(isolab::Check{"envelope_gap", d.inconsistency, 0.0, d.consistent});
    r.tol = opt.tol;
    r.seed = opt.seed;
    r.level = opt.level;
  }
  r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int run_analyze_dir(const AnalyzeArgs& a) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(a.dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  if (ec) {
    std::cerr << "isolab: cannot list " << a.dir << "\n";
    return kExitNoInput;
  }
  std::sort(files.begin(), files.end());
  const isolab::AnalyzeOptions opt = options_of(a);
  int mismatches = 0, errors = 0;
  json summary = json::array();
  for (const auto& f : files) {
    const std::string path = f.string();
    try {
      const std::string text = read_file(path);
      const isolab::io::Document doc = load(path, text);
      const isolab::io::Report r = analyze_document(doc, text, opt);
      std::string expected;
      if (const auto* m = std::get_if<isolab::io::MapDocument>(&doc)) {
        if (m->expected_verdict) expected = isolab::to_string(*m->expected_verdict);
      } else {
        const auto& c = std::get<isolab::io::CommutativeDocument>(doc);
        if (c.expected_isometry) {
          expected = isolab::to_string(*c.expected_isometry ? isolab::Verdict::complete_isometry
                                                            : isolab::Verdict::not_complete_isometry);
        }
      }
      const bool ok = expected.empty() || expected == r.verdict;
      if (!ok) ++mismatches;
      std::cout << f.filename().string() << ": " << r.verdict;
      if (!expected.empty()) std::cout << (ok ? " (as expected)" : " (expected " + expected + ")");
      std::cout << "\n";
      summary.push_back({{"file", f.filename().string()},
                         {"verdict", r.verdict},
                         {"expected", expected.empty() ? json(nullptr) : json(expected)},
                         {"digest", isolab::io::report_digest(r)}});
    } catch (const Exit&) {
      ++errors;
    }
  }
  if (!a.out.empty()) write_file(a.out, summary.dump(2) + "\n");
  std::cout << files.size() << " documents, " << mismatches << " mismatches, " << errors << " errors\n";
  if (errors > 0) return kExitUsage;
  return mismatches == 0 ? 0 : 1;
}

int run_analyze(const AnalyzeArgs& a) {
  if (!a.dir.empty()) return run_analyze_dir(a);
  if (a.input.empty()) {
    std::cerr << "isolab analyze: an input document or --dir is required\n";
    return kExitUsage;
  }
  const std::string text = read_file(a.input);
  const isolab::io::Document doc = load(a.input, text);
  const isolab::io::Report r = analyze_document(doc, text, options_of(a));
  const std::string machine = isolab::io::to_json(r).dump(2) + "\n";
  if (!a.out.empty()) write_file(a.out, machine);
  if (a.format == "machine" && a.out.empty()) {
    std::cout << machine;
  } else {
    print_human(std::cout, a.input, r);
  }
  return verdict_code(*isolab::io::verdict_from_string(r.verdict));
}

struct HolszArgs {
  std::string input, out, format = "human";
  double tol = isolab::kDefaultTol;
};

int run_holsztynski(const HolszArgs& a) {
  const std::string text = read_file(a.input);
  const isolab::io::Document doc = load(a.input, text);
  isolab::CommutativeMap cm;
  if (const auto* c = std::get_if<isolab::io::CommutativeDocument>(&doc)) {
    cm = c->map;
  } else {
    try {
      cm = isolab::from_diagonal_map(std::get<isolab::io::MapDocument>(doc).map, a.tol);
    } catch (const isolab::StructureError& e) {
      std::cerr << a.input << ": not a map between commutative algebras: " << e.what() << "\n";
      return kExitNotCommutative;
    }
  }
  const isolab::HolsztynskiCertificate c = isolab::extract_certificate(cm, a.tol);
  const bool contr = isolab::contractive(cm, a.tol);
  const bool iso = contr && c.surjective;
  json gamma = json::array();
  for (const auto& g : c.gamma) gamma.push_back(json::array({g.real(), g.imag()}));
  const json report = {{"version", isolab::io::kFormatVersion},
                       {"kind", "holsztynski_report"},
                       {"tool_version", isolab::io::kToolVersion},
                       {"input_digest", isolab::io::sha256_hex(text)},
                       {"k1", cm.k1},
                       {"k2", cm.k2},
                       {"norm", isolab::linf_norm(cm)},
                       {"contractive", contr},
                       {"e", c.e},
                       {"gamma", gamma},
                       {"phi", c.phi},
                       {"surjective", c.surjective},
                       {"uncovered", c.uncovered},
                       {"isometry", iso}};
  if (!a.out.empty()) write_file(a.out, report.dump(2) + "\n");
  if (a.format == "machine" && a.out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ostream& os = std::cout;
    os << a.input << ": " << (iso ? "isometry" : "not an isometry") << " (points are 0-based)\n";
    os << "  norm " << isolab::linf_norm(cm) << (contr ? " (contractive)" : " (not contractive)") << "\n";
    os << "  E     =";
    for (const auto y : c.e) os << " " << y;
    os << "\n  phi   =";
    for (const auto x : c.phi) os << " " << x;
    os << "\n  gamma =";
    for (const auto& g : c.gamma) os << " (" << g.real() << "," << g.imag() << ")";
    os << "\n  phi " << (c.surjective ? "is onto" : "is not onto") << "\n";
    if (!c.uncovered.empty()) {
      os << "  uncovered points:";
      for (const auto x : c.uncovered) os << " " << x;
      os << "\n";
    }
  }
  return iso ? 0 : 1;
}

struct NicexArgs {
  Index n = 3, levels = 4, samples = 1000;
  std::string scheme = "inverse", mode = "diagonal", out, format = "human";
  std::vector<double> eps;
  bool control = false;
  std::uint64_t seed = 20240607;
  double tol = 1e-10;
};

int run_nicex(const NicexArgs& a) {
  isolab::NicexConfig cfg;
  cfg.n = a.n;
  cfg.levels = a.levels;
  cfg.mode = a.mode == "matrix" ? isolab::NicexMode::matrix : isolab::NicexMode::diagonal;
  if (!a.eps.empty()) {
    cfg.epsilons = a.eps;
  } else if (a.scheme == "geometric") {
    for (Index k = 1; k <= a.levels; ++k) cfg.epsilons.push_back(std::ldexp(1.0, -static_cast<int>(k + 1)));
  }
  isolab::NicexMaps maps;
  try {
    maps = a.control ? isolab::build_control(cfg) : isolab::build_nicex(cfg);
  } catch (const isolab::ConfigError& e) {
    std::cerr << "isolab nicex: " << e.what() << "\n";
    return kExitUsage;
  }
  const isolab::LowerBoundReport lb = isolab::lower_bound_check(maps, a.samples, a.seed);
  const isolab::NoProjectionReport np = isolab::no_projection_check(maps, a.tol);
  const json report = {{"version", isolab::io::kFormatVersion},
                       {"kind", "nicex_report"},
                       {"tool_version", isolab::io::kToolVersion},
                       {"n", a.n},
                       {"levels", a.levels},
                       {"epsilons", maps.eps},
                       {"mode", a.mode},
                       {"control", a.control},
                       {"lower_bound", {{"samples", lb.samples},
                                        {"violations", lb.violations},
                                        {"sup_violations", lb.sup_violations},
                                        {"worst_ratio", lb.worst_ratio},
                                        {"row_sum_error", lb.row_sum_error},
                                        {"nonnegative", lb.nonnegative}}},
                       {"commutant_dim", np.commutant_dim},
                       {"commutant_is_diagonal", np.commutant_is_diagonal},
                       {"enumerated", np.enumerated},
                       {"masks_checked", np.masks_checked},
                       {"surviving", np.surviving}};
  if (!a.out.empty()) write_file(a.out, report.dump(2) + "\n");
  if (a.format == "machine" && a.out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << (a.control ? "control map" : "nicex") << " n=" << a.n << " K=" << a.levels << " (" << a.mode << ")\n";
    std::cout << "  lower bound: " << lb.violations << " violations over " << lb.samples << " samples, worst ratio "
              << lb.worst_ratio << "\n";
    std::cout << "  commutant of the diagonal images: dim " << np.commutant_dim
              << (np.commutant_is_diagonal ? " (diagonal algebra)" : "") << "\n";
    if (np.enumerated) {
      std::cout << "  surviving projections: " << np.surviving << " of " << np.masks_checked << "\n";
    } else {
      std::cout << "  enumeration refused: nK = " << maps.size() << " exceeds " << isolab::kNicexEnumerationLimit << "\n";
    }
  }
  if (!np.enumerated) return kExitRefused;
  const bool expected = a.control ? np.surviving > 1 : (np.only_identity_survives() && lb.passed());
  return expected ? 0 : 1;
}

struct GenArgs {
  std::string kind = "complete_isometry", out, name;
  isolab::GenSpec spec;
  double margin = 0.05, delta = 0.05;
  Index k1 = 3, k2 = 5;
  bool real = false, not_onto = false;
};

json gen_spec_json(const isolab::GenSpec& g) {
  return {{"m", g.m},
          {"n", g.n},
          {"r", g.r},
          {"s", g.s},
          {"multiplicity", g.multiplicity},
          {"contraction_scale", g.contraction_scale},
          {"terms", g.terms},
          {"seed", g.seed},
          {"identity_frame", g.identity_frame}};
}

int run_gen(const GenArgs& a) {
  using isolab::io::matrix_to_json;
  std::string text;
  try {
    if (a.kind == "commutative") {
      const auto [cm, truth] = isolab::random_composition_map(a.k1, a.k2, a.spec.seed, a.real, !a.not_onto);
      isolab::io::CommutativeDocument d{cm, a.name, truth.surjective};
      text = isolab::io::to_json(d).dump(2);
    } else {
      isolab::io::MapDocument d;
      d.name = a.name;
      json gt = {{"generator", a.kind}, {"spec", gen_spec_json(a.spec)}};
      if (a.kind == "complete_isometry" || a.kind == "triple_morphism") {
        auto made = a.kind == "triple_morphism" ? isolab::random_triple_morphism(a.spec)
                                                : isolab::random_complete_isometry(a.spec);
        d.map = made.first;
        d.expected_verdict = isolab::Verdict::complete_isometry;
        gt["multiplicity"] = made.second.multiplicity;
        gt["u"] = matrix_to_json(made.second.u);
        gt["v"] = matrix_to_json(made.second.v);
        gt["p"] = matrix_to_json(made.second.p);
        gt["q"] = matrix_to_json(made.second.q);
      } else if (a.kind == "noncontraction") {
        const isolab::NonContraction nc = isolab::random_noncontraction(a.spec, a.margin);
        d.map = nc.map;
        d.expected_verdict = isolab::Verdict::not_complete_isometry;
        gt["witness"] = matrix_to_json(nc.witness);
        gt["ratio"] = nc.ratio;
      } else if (a.kind == "perturbed") {
        const isolab::PerturbedIsometry p = isolab::random_perturbed_isometry(a.spec, a.delta);
        d.map = p.map;
        d.expected_verdict = isolab::Verdict::not_complete_isometry;
        gt["witness"] = matrix_to_json(p.witness);
        gt["ratio"] = p.ratio;
        gt["distance"] = p.distance;
      } else {
        std::cerr << "isolab gen: unknown kind " << a.kind << "\n";
        return kExitUsage;
      }
      d.ground_truth = gt;
      text = isolab::io::to_json(d).dump(2);
    }
  } catch (const isolab::ArgumentError& e) {
    std::cerr << "isolab gen: " << e.what() << "\n";
    return kExitUsage;
  } catch (const isolab::DimensionError& e) {
    std::cerr << "isolab gen: " << e.what() << "\n";
    return kExitUsage;
  }
  text += "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(a.out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isolab: complete isometries between matrix spaces"};
  app.set_version_flag("--version", std::string(isolab::io::kToolVersion));
  app.require_subcommand(1);
  const std::vector<std::string> formats{"human", "machine"};

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Decide complete isometry and print the certificate");
  analyze->add_option("input", aa.input, "Map document (JSON)");
  analyze->add_option("--dir", aa.dir, "Analyze every *.json document in a directory");
  analyze->add_option("--tol", aa.tol, "Rank and closure tolerance")->envname("ISOLAB_TOL");
  analyze->add_option("--seed", aa.seed, "Seed of the randomized searches");
  analyze->add_option("--level", aa.level, "Falsification level (0 means min(r, s))");
  analyze->add_option("--max-iters", aa.max_iters, "Iteration budget of the positivity search");
  analyze->add_option("--out", aa.out, "Write the machine-readable report here");
  analyze->add_option("--format", aa.format, "human or machine")->check(CLI::IsMember(formats));

  HolszArgs ha;
  auto* holsz = app.add_subcommand("holsztynski", "Recover (E, gamma, phi) of a map between l_inf spaces");
  holsz->add_option("input", ha.input, "Commutative or diagonal map document")->required();
  holsz->add_option("--tol", ha.tol, "Classification tolerance")->envname("ISOLAB_TOL");
  holsz->add_option("--out", ha.out, "Write the machine-readable report here");
  holsz->add_option("--format", ha.format, "human or machine")->check(CLI::IsMember(formats));

  NicexArgs na;
  auto* nicex = app.add_subcommand("nicex", "Projection rigidity of the truncated nicex family");
  nicex->add_option("--n", na.n, "Coordinates");
  nicex->add_option("--levels", na.levels, "Truncation level K");
  nicex->add_option("--eps-scheme", na.scheme, "inverse: 1/(k+2); geometric: 2^-(k+1)")
      ->check(CLI::IsMember({"inverse", "geometric"}));
  nicex->add_option("--eps", na.eps, "Explicit epsilons (overrides the scheme)")->delimiter(',');
  nicex->add_option("--mode", na.mode, "diagonal or matrix")->check(CLI::IsMember({"diagonal", "matrix"}));
  nicex->add_flag("--control", na.control, "Use the block map a -> diag(a, ..., a) instead");
  nicex->add_option("--samples", na.samples, "Random inputs for the lower bound");
  nicex->add_option("--seed", na.seed, "Seed of the random inputs");
  nicex->add_option("--tol", na.tol, "Tolerance of the homomorphism checks")->envname("ISOLAB_TOL");
  nicex->add_option("--out", na.out, "Write the machine-readable report here");
  nicex->add_option("--format", na.format, "human or machine")->check(CLI::IsMember(formats));

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Write a generated map document with ground truth");
  gen->add_option("--kind", ga.kind, "complete_isometry, triple_morphism, noncontraction, perturbed or commutative")
      ->check(CLI::IsMember({"complete_isometry", "triple_morphism", "noncontraction", "perturbed", "commutative"}));
  gen->add_option("--m", ga.spec.m, "Domain rows");
  gen->add_option("--n", ga.spec.n, "Domain columns");
  gen->add_option("--r", ga.spec.r, "Codomain rows");
  gen->add_option("--s", ga.spec.s, "Codomain columns");
  gen->add_option("--multiplicity", ga.spec.multiplicity, "Copies of x");
  gen->add_option("--scale", ga.spec.contraction_scale, "Scale of the complementary block");
  gen->add_option("--terms", ga.spec.terms, "Unitary conjugations in the complementary block");
  gen->add_option("--seed", ga.spec.seed, "Generator seed");
  gen->add_flag("--identity-frame", ga.spec.identity_frame, "Use U = V = I");
  gen->add_option("--margin", ga.margin, "Level-1 expansion of a noncontraction");
  gen->add_option("--delta", ga.delta, "Perturbation size");
  gen->add_option("--k1", ga.k1, "Domain points (commutative)");
  gen->add_option("--k2", ga.k2, "Codomain points (commutative)");
  gen->add_flag("--real", ga.real, "Real weights (commutative)");
  gen->add_flag("--not-onto", ga.not_onto, "Leave a domain point uncovered (commutative)");
  gen->add_option("--name", ga.name, "Document name");
  gen->add_option("--out", ga.out, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  try {
    if (*analyze) return run_analyze(aa);
    if (*holsz) return run_holsztynski(ha);
    if (*nicex) return run_nicex(na);
    if (*gen) return run_gen(ga);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "isolab: " << e.what() << "\n";
    return kExitSoftware;
  }
  return kExitUsage;
}

// Copyright 2026 The patsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "oracles.h"
#include "patsim/cli.h"
#include "patsim/forecaster.h"
#include "patsim/lie_space.h"
#include "patsim/ontology.h"
#include "patsim/pipeline.h"
#include "patsim/serialize.h"
#include "patsim/service.h"
#include "test_util.h"

namespace patsim {
namespace {

using nlohmann::json;
using ::patsim::testing::ShippedRegistry;
using ::patsim::testing::ShippedRegistryDoc;
using ::patsim::testing::ShippedTables;

struct Outcome {
  bool pass = true;
  std::string detail;
  void Require(bool cond, const std::string& what) {
    if (!cond && pass) detail = what;
    pass = pass && cond;
  }
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

PatternVector RandomVector(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PatternVector v;
  for (auto& x : v) x = u(rng);
  return v;
}

SkewMatrix RandomUnitSkew(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  SkewMatrix m;
  for (std::size_t i = 0; i < kDims; ++i) {
    for (std::size_t j = i + 1; j < kDims; ++j) {
      m(i, j) = g(rng);
      m(j, i) = -m(i, j);
    }
  }
  return (1.0 / m.FrobeniusNorm()) * m;
}

bool Contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// 1. Shipped registry validates; 20 single-edit mutations are each caught
// and the offending entry is named.
Outcome Validators() {
  Outcome o;
  PatternRegistry reg = ShippedRegistry();
  o.Require(ValidateInverses(reg).ok(), "validate_inverses fails on shipped registry");
  o.Require(ValidateCompositionClosure(reg).ok(), "closure fails on shipped registry");

  const json doc = ShippedRegistryDoc();
  int caught = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    json m = doc;
    const json dropped = m["inverse_table"][i * 18 / 10];
    m["inverse_table"].erase(m["inverse_table"].begin() + static_cast<long>(i * 18 / 10));
    auto mutated = ParseRegistry(m);
    if (!mutated.ok()) continue;
    ValidationReport r = ValidateInverses(*mutated);
    std::string a = dropped[0], b = dropped[1];
    if (!r.ok() && Contains(r.ToString(), absl::StrCat("(", b, " -> ", a, ")"))) ++caught;
  }
  for (std::size_t i = 0; i < 10; ++i) {
    json m = doc;
    const std::size_t row = i * 14 / 10;
    const std::string bogus = absl::StrCat("Unregistered Pattern ", i);
    m["composition_table"][row][2] = bogus;
    auto mutated = ParseRegistry(m);
    if (!mutated.ok()) continue;
    ValidationReport r = ValidateCompositionClosure(*mutated);
    std::string a = m["composition_table"][row][0], b = m["composition_table"][row][1];
    if (!r.ok() && Contains(r.ToString(), bogus) && Contains(r.ToString(), a) &&
        Contains(r.ToString(), b)) {
      ++caught;
    }
  }
  o.Require(caught == 20, absl::StrCat(caught, "/20 mutations caught"));
  if (o.pass) o.detail = "shipped PASS, 20/20 mutations caught";
  return o;
}

// 2. Hat map is exactly skew and kills constants.
Outcome HatMap() {
  Outcome o;
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    SkewMatrix h = Hat(RandomVector(rng));
    for (std::size_t i = 0; i < kDims; ++i) {
      for (std::size_t j = 0; j < kDims; ++j) {
        o.Require(h(i, j) + h(j, i) == 0.0, "hat(v) + hat(v)^T not exactly zero");
      }
    }
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    PatternVector c;
    c.fill(u(rng));
    o.Require(Hat(c) == SkewMatrix{}, "hat(c*1) != 0");
  }
  if (o.pass) o.detail = "1000 vectors exact, constants in kernel";
  return o;
}

// 3. Bracket antisymmetry, bilinearity, Jacobi.
Outcome BracketAlgebra() {
  Outcome o;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double anti = 0.0, bilin = 0.0, jacobi = 0.0;
  auto start = std::chrono::steady_clock::now();
  for (int t = 0; t < 500; ++t) {
    SkewMatrix x = RandomUnitSkew(rng), y = RandomUnitSkew(rng), z = RandomUnitSkew(rng);
    double a = u(rng), b = u(rng);
    anti = std::max(anti, (Bracket(x, y) + Bracket(y, x)).FrobeniusNorm());
    bilin = std::max(bilin, (Bracket(a * x + b * y, z) - a * Bracket(x, z) - b * Bracket(y, z))
                                .FrobeniusNorm());
    jacobi = std::max(jacobi, (Bracket(x, Bracket(y, z)) + Bracket(y, Bracket(z, x)) +
                               Bracket(z, Bracket(x, y)))
                                  .FrobeniusNorm());
  }
  double secs = Seconds(start);
  o.Require(anti <= 1e-12, absl::StrCat("antisymmetry residual ", anti));
  o.Require(bilin <= 1e-12, absl::StrCat("bilinearity residual ", bilin));
  o.Require(jacobi <= 1e-9, absl::StrCat("Jacobi residual ", jacobi));
  o.Require(secs < 1.0, absl::StrCat("took ", secs, " s"));
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max residuals anti %.1e, bilinear %.1e, Jacobi %.1e; %.3f s",
                anti, bilin, jacobi, secs);
  if (o.pass) o.detail = buf;
  return o;
}

// 4. Lie similarity fixed points and range.
Outcome LieSimilarityChecks() {
  Outcome o;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 1000; ++t) {
    PatternVector v = RandomVector(rng);
    o.Require(std::abs(LieSimilarity(v, v, v).value - 1.0) <= 1e-12, "sim(v,v,v) != 1");

    PatternVector a = RandomVector(rng), b = RandomVector(rng), c = RandomVector(rng);
    std::vector<double> s(kDims), cv(c.begin(), c.end());
    for (std::size_t i = 0; i < kDims; ++i) s[i] = a[i] + b[i];
    double proj = oracle::Dot(cv, s) / oracle::Dot(s, s);
    for (std::size_t i = 0; i < kDims; ++i) c[i] -= proj * s[i];
    o.Require(std::abs(LieSimilarity(a, b, c).value) <= 1e-12, "orthogonal target not 0");

    double r = LieSimilarity(RandomVector(rng), RandomVector(rng), RandomVector(rng)).value;
    o.Require(r >= -1.0 && r <= 1.0, "similarity out of [-1, 1]");
  }
  if (o.pass) o.detail = "1000 trials each: identity, orthogonal, range";
  return o;
}

// 5. Decay calibration.
Outcome DecayCalibration() {
  Outcome o;
  double f = Confidence(1.0, 0.85, 6);
  double c = Confidence(0.78, 0.85, 6);
  o.Require(f >= 0.37714 && f <= 0.37716, absl::StrCat("0.85^6 = ", f));
  o.Require(c >= 0.2941 && c <= 0.2942, absl::StrCat("confidence = ", c));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "0.85^6 = %.7f, confidence(0.78, 0.85, 6) = %.6f", f, c);
  if (o.pass) o.detail = buf;
  return o;
}

// 6. Path-consistency factor endpoints and bounds.
Outcome PathConsistency() {
  Outcome o;
  double f0 = PathConsistencyFactor(0.0, 0.30);
  o.Require(std::abs(f0 - 10.0 / 13.0) <= 1e-9, absl::StrCat("factor(0) = ", f0));
  o.Require(PathConsistencyFactor(1.0, 0.30) == 1.0, "factor(1) != 1.0 exactly");

  PatternRegistry reg;
  for (const char* n : {"A", "B", "C"}) reg.patterns[n].name = n;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> w(0.001, 1.0);
  for (int t = 0; t < 1000; ++t) {
    for (const char* n : {"A", "B", "C"}) reg.patterns[n].vector = RandomVector(rng);
    TransitionCandidate c;
    c.source_a = "A";
    c.source_b = "B";
    c.target = "C";
    c.raw_weight = w(rng);
    double ratio = AdjustPathConsistency(c, reg, 0.30).adjusted_weight / c.raw_weight;
    o.Require(ratio >= 1.0 / 1.3 - 1e-15 && ratio <= 1.0 + 1e-15,
              absl::StrCat("ratio ", ratio, " out of bounds"));
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "factor(0) = %.9f, factor(1) = 1.0, 1000 ratios in bounds", f0);
  if (o.pass) o.detail = buf;
  return o;
}

// 7. Attractor set against the double-loop oracle.
Outcome AttractorOracle() {
  Outcome o;
  std::mt19937_64 rng(7);
  const std::vector<std::string> universe = {"p", "q", "r", "s"};
  int mismatches = 0;
  auto start = std::chrono::steady_clock::now();
  for (int t = 0; t < 1000; ++t) {
    int n = std::uniform_int_distribution<int>(1, 4)(rng);
    std::uniform_int_distribution<int> pick(0, n);
    std::bernoulli_distribution present(0.6);
    PatternRegistry reg;
    oracle::Table table;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!present(rng)) continue;
        int k = pick(rng);
        std::string target = k == n ? "outside" : universe[k];
        reg.composition[{universe[i], universe[j]}] = target;
        table[{universe[i], universe[j]}] = target;
      }
    }
    std::set<std::string> s;
    for (int i = 0; i < n; ++i) {
      if (present(rng)) s.insert(universe[i]);
    }
    if (AttractorSet(reg, s) != oracle::AttractorsByDoubleLoop(table, s)) ++mismatches;
  }
  double secs = Seconds(start);
  o.Require(mismatches == 0, absl::StrCat(mismatches, " mismatches"));
  o.Require(secs < 5.0, absl::StrCat("took ", secs, " s"));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "1000 random tables, 0 mismatches, %.3f s", secs);
  if (o.pass) o.detail = buf;
  return o;
}

// 8. Attractor identities on the shipped scenarios.
Outcome ScenarioIdentities() {
  Outcome o;
  PatternRegistry reg = ShippedRegistry();
  o.Require(reg.scenarios.size() == 6, "expected six named scenarios");
  for (const auto& [name, sc] : reg.scenarios) {
    auto r = Simulate(reg, sc.initial_patterns);
    o.Require(r.ok() && r->halted_on_fixpoint && r->converged_at <= 6,
              absl::StrCat(name, " did not converge within 6 steps"));
  }
  auto tech = Simulate(reg, reg.scenarios.at("us_china_tech_decoupling").initial_patterns);
  o.Require(tech.ok() && tech->primary == "Technology Standards Leadership",
            "tech decoupling primary is " + (tech.ok() ? tech->primary : "error"));
  o.Require(tech.ok() && !tech->bifurcation_points.empty(), "tech decoupling has no bifurcation");

  const std::string ceasefire = "Ceasefire / Peace Agreement";
  auto inv = Simulate(reg, reg.scenarios.at("china_taiwan_invasion").initial_patterns);
  o.Require(inv.ok() && inv->primary == "Multilateral Alliance Sanctions",
            "invasion primary is " + (inv.ok() ? inv->primary : "error"));
  bool fired = false;
  double final_weight = 1.0;
  if (inv.ok()) {
    for (const auto& s : inv->steps) {
      for (const auto& c : s.fired) {
        fired = fired || (c.kind == TransitionKind::kInverse && c.target == ceasefire);
      }
    }
    auto it = inv->steps.back().active.find(ceasefire);
    if (it != inv->steps.back().active.end()) final_weight = it->second;
  }
  o.Require(fired, "ceasefire inverse never fired");
  o.Require(final_weight < 0.05, absl::StrCat("ceasefire posterior ", final_weight));
  if (o.pass && tech.ok() && inv.ok()) {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "6/6 converge; tech -> TSL (bifurcation step %d); invasion -> MAS "
                  "(P=%.3f), ceasefire %.4f",
                  tech->bifurcation_points.front(), inv->attractors.front().posterior,
                  final_weight);
    o.detail = buf;
  }
  return o;
}

// 9. Byte-identical reruns; CLI machine output equals the HTTP body.
Outcome Determinism() {
  Outcome o;
  PatternRegistry reg = ShippedRegistry();
  Service service(ShippedRegistry(), ShippedTables(), nullptr);
  for (const auto& [name, sc] : reg.scenarios) {
    auto a = Simulate(reg, sc.initial_patterns);
    auto b = Simulate(reg, sc.initial_patterns);
    o.Require(a.ok() && b.ok() && CanonicalDump(ToJson(*a)) == CanonicalDump(ToJson(*b)),
              name + " reruns differ");

    std::vector<std::string> args = {"patsim", "forecast", "--scenario", name, "--format",
                                     "machine"};
    std::vector<const char*> argv;
    for (const auto& s : args) argv.push_back(s.c_str());
    std::istringstream in;
    std::ostringstream out, err;
    int code = RunCli(static_cast<int>(argv.size()), argv.data(), in, out, err);
    HttpResponse h = service.Handle("POST", "/forecast", json{{"scenario", name}}.dump());
    o.Require(code == 0 && h.status == 200 && out.str() == h.body + "\n",
              name + " CLI and HTTP bodies differ");
  }
  if (o.pass) o.detail = "6 scenarios byte-identical across runs and CLI/HTTP";
  return o;
}

class TamperingWriter : public TextWriter {
 public:
  absl::StatusOr<std::string> Write(json& fields) override {
    fields["conclusion"]["composite_confidence"] = 1.0;
    fields["probability_tree"]["derived"] = json::array();
    fields["lie_algebra"]["state_vector"] = {0, 0, 0, 0, 0, 0, 0, 0};
    return std::string("rewritten");
  }
};

// 10. Event co-activation, derived list shape, numeric lock.
Outcome PipelineChecks() {
  Outcome o;
  PatternRegistry reg = ShippedRegistry();
  PipelineTables tables = ShippedTables();
  const std::string headline =
      "Artillery shelling and missile strikes overnight left 27 civilians dead and "
      "hundreds wounded.";
  auto events = ExtractEvents(headline, tables.event_rules);
  o.Require(events.size() >= 2, absl::StrCat(events.size(), " events"));

  auto report = RunAnalysis(headline, reg, tables);
  o.Require(report.ok(), "analysis failed");
  if (!report.ok()) return o;
  o.Require(report->derived.size() <= 5, "derived list longer than 5");
  for (std::size_t i = 1; i < report->derived.size(); ++i) {
    o.Require(report->derived[i - 1].adjusted_weight >= report->derived[i].adjusted_weight,
              "derived list unsorted");
  }
  TamperingWriter writer;
  auto tampered = RunAnalysis(headline, reg, tables, {}, &writer);
  o.Require(tampered.ok() &&
                CanonicalDump(LockedFields(*tampered)) == CanonicalDump(LockedFields(*report)),
            "writer altered a numeric field");
  o.Require(tampered.ok() && tampered->conclusion_text == "rewritten", "writer text dropped");
  if (o.pass) {
    o.detail = absl::StrCat(events.size(), " events, ", report->derived.size(),
                            " derived (sorted), locked fields byte-identical");
  }
  return o;
}

// 11. Strict thresholds.
Outcome Thresholds() {
  Outcome o;
  o.Require(DetectBifurcation({{"a", 0.50}, {"b", 0.40}}, 0.15), "{0.50,0.40} not flagged");
  o.Require(!DetectBifurcation({{"a", 0.60}, {"b", 0.40}}, 0.15), "{0.60,0.40} flagged");
  PatternVector zero{}, d25{}, d30{};
  d25[0] = 0.25;
  d30[0] = 0.30;
  o.Require(!PhaseDetect(zero, d25, 0.25), "phase at 0.25 flagged");
  o.Require(PhaseDetect(zero, d30, 0.25), "phase at 0.30 not flagged");
  if (o.pass) o.detail = "bifurcation 0.10 yes / 0.20 no; phase 0.25 no / 0.30 yes";
  return o;
}

// 12. Path-independence range and the proportional case.
Outcome PathIndependenceRange() {
  Outcome o;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  for (int t = 0; t < 1000; ++t) {
    PathDiagnostic d = PathIndependence(RandomVector(rng), RandomVector(rng));
    o.Require(d.delta >= 0.0 && d.delta <= 1.0, absl::StrCat("delta ", d.delta));
    PatternVector v = RandomVector(rng), w;
    double k = scale(rng);
    for (std::size_t i = 0; i < kDims; ++i) w[i] = k * v[i];
    PathDiagnostic p = PathIndependence(v, w);
    o.Require(p.commuting && p.delta == 1.0, "proportional pair not flagged");
  }
  if (o.pass) o.detail = "1000 pairs in [0,1], 1000 proportional pairs flagged";
  return o;
}

}  // namespace
}  // namespace patsim

int main() {
  using patsim::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"validators and mutations", patsim::Validators},
      {"hat map skew and kernel", patsim::HatMap},
      {"bracket algebra", patsim::BracketAlgebra},
      {"lie similarity", patsim::LieSimilarityChecks},
      {"decay calibration", patsim::DecayCalibration},
      {"path-consistency factor", patsim::PathConsistency},
      {"attractor oracle", patsim::AttractorOracle},
      {"scenario attractor identities", patsim::ScenarioIdentities},
      {"determinism", patsim::Determinism},
      {"pipeline co-activation and lock", patsim::PipelineChecks},
      {"threshold semantics", patsim::Thresholds},
      {"path-independence diagnostic", patsim::PathIndependenceRange},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o = criteria[i].second();
    std::printf("%s  %2zu  %-34s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

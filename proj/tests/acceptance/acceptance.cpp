// Copyright 2026 The Shapeprog Authors.
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

// Acceptance runner: one PASS/FAIL line per primary criterion. Exit status
// is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "../unit/gen_program.hpp"
#include "../unit/oracles.hpp"
#include "shapeprog/fixtures.hpp"
#include "shapeprog/llm.hpp"
#include "shapeprog/metrics.hpp"

using namespace shapeprog;
using shapeprog::testing::ProgramGenerator;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and budgets.
constexpr double kIdentityTolDiag = 1e-9;
constexpr double kIdentityBudgetSec = 1.0;
constexpr double kOracleRelTol = 1e-6;
constexpr int kOracleSamples = 64;
constexpr double kOracleBudgetSec = 30.0;
constexpr int kSoundnessSamples = 16;  // plus the two range endpoints
constexpr std::uint64_t kSoundnessSeed = 0x50d;
constexpr double kClosedFormTol = 1e-9;
constexpr int kConjugationPairs = 200;
constexpr int kConjugationSigmas = 32;
constexpr double kConjugationTol = 1e-9;
constexpr int kRoundTripPrograms = 500;
constexpr int kCompositionPairs = 100;
constexpr double kCompositionTol = 1e-9;
constexpr double kEvalMedianBudgetMs = 10.0;
constexpr int kEvalRepeats = 101;
constexpr double kPropagateBudgetSec = 5.0;
constexpr double kMetricTol = 1e-12;
constexpr double kRigidArapTol = 1e-20;

struct Outcome {
  bool pass = false;
  std::string detail;
};

const ShapeGraph& graph_of(const std::string& name) {
  static std::map<std::string, ShapeGraph> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, build_graph(fixtures::by_name(name))).first;
  return it->second;
}

std::vector<std::string> all_fixtures() {
  auto names = fixtures::names();
  names.push_back("rails50");
  return names;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double max_cage_diff(const CageCorners& a, const CageCorners& b) { return (a - b).cwiseAbs().maxCoeff(); }

Outcome identity() {
  const auto t0 = Clock::now();
  double worst = 0.0;  // in units of diag
  int programs = 0;
  for (const auto& name : all_fixtures()) {
    const auto& g = graph_of(name);
    ProgramGenerator gen(0x1d + name.size(), g);
    std::vector<EditProgram> progs;
    for (int k = 0; k < 10; ++k) progs.push_back(gen.program(1 + k % 3, 1 + k % 6));
    for (const auto& sc : fixtures::scenarios())
      if (sc.fixture == name) progs.push_back(parse_program(sc.ground_truth));
    for (const auto& p : progs) {
      auto d = ProgramEvaluator(g, p).evaluate(p.zeros());
      if (d.parts.size() != g.nodes.size()) return {false, name + ": part count changed at zero"};
      for (int i = 0; i < g.size(); ++i) {
        const auto& got = d.parts[static_cast<std::size_t>(i)].vertices;
        const auto& rest = g.node(i).mesh.vertices;
        for (std::size_t v = 0; v < rest.size(); ++v) worst = std::max(worst, (got[v] - rest[v]).norm() / g.diag);
      }
      ++programs;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < kIdentityTolDiag && secs < kIdentityBudgetSec,
          std::to_string(programs) + " programs on " + std::to_string(all_fixtures().size()) +
              " fixtures, " + fmt("max error %.2e diag, %.3f s", worst, secs)};
}

Outcome solver_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int amounts = 0;
  for (const auto& sc : fixtures::scenarios()) {
    const auto& g = graph_of(sc.fixture);
    const auto seeds = parse_program(sc.seeds);
    for (int variant = 0; variant < 3; ++variant) {
      PropagateOptions o;
      o.use_nhbd = variant != 1;
      o.use_breaking = variant != 2;
      auto r = propagate(g, seeds, o);
      for (const auto& s : r.solved) {
        worst = std::max(worst, testing::solver_oracle_gap(s, r.program.ranges(), kOracleSamples, 0x0ac1e));
        ++amounts;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {amounts > 0 && worst < kOracleRelTol && secs < kOracleBudgetSec,
          std::to_string(amounts) + " solved amounts, " + fmt("max relative gap %.2e, %.2f s", worst, secs)};
}

Outcome soundness() {
  int checked = 0, violations = 0;
  std::string first;
  for (const auto& sc : fixtures::scenarios()) {
    const auto& g = graph_of(sc.fixture);
    const auto seeds = parse_program(sc.seeds);
    for (int variant = 0; variant < 3; ++variant) {
      PropagateOptions o;
      o.use_nhbd = variant != 1;
      o.use_breaking = variant != 2;
      auto r = propagate(g, seeds, o);
      auto cages = cage_functions(g, r.program);
      for (const auto& [id, ok] : r.relation_state) {
        if (!ok) continue;
        ++checked;
        if (!relation_holds(g, g.find_relation(id), cages, r.program.ranges(), kSoundnessSamples, kSoundnessSeed)) {
          ++violations;
          if (first.empty()) first = sc.name + "/" + id;
        }
      }
    }
  }
  return {checked > 0 && violations == 0,
          std::to_string(checked) + " maintained relations rechecked, " + std::to_string(violations) +
              " violations" + (first.empty() ? "" : " (first " + first + ")")};
}

Outcome golden() {
  const auto& g = graph_of("chair");
  MockProvider provider(std::filesystem::path(SHAPEPROG_SOURCE_DIR) / "fixtures/mock");
  InferOptions io;
  io.parallel = false;
  auto out = run_edit("widen the chair", g, provider, io, PropagateOptions{});
  const std::string text = print_program(out.result.program);
  const std::string expected = slurp(std::filesystem::path(SHAPEPROG_SOURCE_DIR) / "fixtures/golden/chair_widen.prog");
  if (text != expected) return {false, "program differs from the golden file"};

  const auto& seat = g.node(g.find_part("seat")).cage;
  const double halfwidth = 0.5 * (seat.rest.colwise().maxCoeff() - seat.rest.colwise().minCoeff())(0);
  double worst = 0.0;
  int legs = 0;
  for (const auto& op : out.result.program.ops) {
    const auto& n = g.node(g.find_part(op.operand.name));
    if (n.label != "leg") continue;
    ++legs;
    const double offset = cage_center(n.cage.rest).x();
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double moved = eval(op.amount, {{"x", x}}) * op.axis.x();
      worst = std::max(worst, std::abs(moved - offset / halfwidth * x));
    }
  }
  return {legs == 4 && worst < kClosedFormTol,
          "byte-identical; " + std::to_string(legs) + fmt(" legs, closed-form error %.2e", worst)};
}

Outcome conjugation() {
  const auto& g = graph_of("chair");
  ProgramGenerator gen(0xc0417, g);
  UniformSampler rng(0x7a);
  double worst = 0.0;
  for (int trial = 0; trial < kConjugationPairs; ++trial) {
    RigidTransform t;
    switch (trial % 3) {
      case 0: t = RigidTransform::Reflection(gen.unit(), rng.next(-1, 1)); break;
      case 1: t = RigidTransform::Translation(Vec3(rng.next(-2, 2), rng.next(-2, 2), rng.next(-2, 2))); break;
      default: t = RigidTransform::Rotation(gen.unit(), gen.point(), rng.next(-3, 3)); break;
    }
    const Hexahedron h = Hexahedron::FromBox(gen.point(), rotation_about(gen.unit(), rng.next(-3, 3)),
                                             Vec3(rng.next(0.1, 0.6), rng.next(0.1, 0.6), rng.next(0.1, 0.6)));
    EditProgram p = gen.program(2, 1 + trial % 4);
    std::vector<EditOp> ops_a, ops_b;
    for (auto op : p.ops) {
      op.operand.name = "a";
      ops_a.push_back(op);
      EditOp c = conjugate(op, t);
      c.operand.name = "b";
      ops_b.push_back(c);
    }
    const CageCorners rest_b = t.apply(h.rest);
    for (int s = 0; s < kConjugationSigmas; ++s) {
      auto sigma = gen.sample(p);
      worst = std::max(worst, max_cage_diff(t.apply(apply_numeric(h.rest, ops_a, sigma)),
                                            apply_numeric(rest_b, ops_b, sigma)));
    }
  }
  return {worst < kConjugationTol, std::to_string(kConjugationPairs) + fmt(" pairs, max residual %.2e", worst)};
}

Outcome round_trip() {
  int failures = 0;
  for (int trial = 0; trial < kRoundTripPrograms; ++trial) {
    const auto& names = all_fixtures();
    const auto& g = graph_of(names[static_cast<std::size_t>(trial) % names.size()]);
    ProgramGenerator gen(0x5000 + static_cast<std::uint64_t>(trial), g);
    EditProgram p = gen.program(1 + trial % 3, 1 + trial % 6);
    const std::string text = print_program(p);
    EditProgram q = parse_program(text);
    bool ok = print_program(q) == text && q.params == p.params && q.ops.size() == p.ops.size();
    // Geometry compares through the kind-aware equality; amounts numerically,
    // since parsing may normalize the expression tree.
    for (std::size_t k = 0; ok && k < p.ops.size(); ++k) {
      EditOp same_amount = q.ops[k];
      same_amount.amount = p.ops[k].amount;
      ok = same_amount == p.ops[k] && probably_equal(q.ops[k].amount, p.ops[k].amount, p.ranges());
    }
    if (!ok) ++failures;
  }
  return {failures == 0, std::to_string(kRoundTripPrograms) + " programs, " + std::to_string(failures) + " mismatches"};
}

Outcome composition() {
  double worst = 0.0;
  for (int trial = 0; trial < kCompositionPairs; ++trial) {
    const auto& names = fixtures::names();
    const auto& g = graph_of(names[static_cast<std::size_t>(trial) % names.size()]);
    ProgramGenerator gen(0xc000 + static_cast<std::uint64_t>(trial), g);
    auto a = gen.program(1 + trial % 2, 2 + trial % 3);
    auto b = gen.program(1 + trial % 3, 2 + trial % 4);
    auto ab = compose(a, b);
    ProgramEvaluator ev(g, ab);
    for (int s = 0; s < 4; ++s) {
      auto sa = gen.sample(a), sb = gen.sample(b);
      ParamAssignment sab = sa;
      for (std::size_t k = 0; k < b.params.size(); ++k) sab[ab.params[a.params.size() + k].name] = sb[b.params[k].name];
      auto cages = ev.cages(sab);
      for (int i = 0; i < g.size(); ++i) {
        auto mid = apply_numeric(g.node(i).cage.rest, ops_on_part(a, g.node(i).id), sa);
        auto ref = apply_numeric(mid, ops_on_part(b, g.node(i).id), sb);
        worst = std::max(worst, max_cage_diff(cages[static_cast<std::size_t>(i)], ref));
      }
    }
  }
  return {worst < kCompositionTol, std::to_string(kCompositionPairs) + fmt(" pairs, max corner error %.2e", worst)};
}

SolveOutcome synthetic(int broken, double arap, int planes, int candidate) {
  SolveOutcome o;
  for (int k = 0; k < broken; ++k) o.broken.push_back("r" + std::to_string(k));
  o.arap_energy = arap;
  o.sym_planes = planes;
  o.candidate = candidate;
  return o;
}

Outcome selection() {
  int failed = 0;
  auto expect = [&](std::vector<SolveOutcome> v, int winner) {
    if (select(v).candidate != winner) ++failed;
  };
  expect({synthetic(2, 0.0, 3, 0), synthetic(1, 5.0, 0, 1), synthetic(2, 0.0, 3, 2)}, 1);  // broken count first
  expect({synthetic(0, 0.25, 3, 0), synthetic(0, 0.0, 0, 1)}, 1);                         // then energy
  expect({synthetic(0, 0.5, 1, 0), synthetic(0, 0.5, 3, 1)}, 1);                          // then planes
  expect({synthetic(0, 0.5, 3, 4), synthetic(0, 0.5, 3, 2)}, 2);                          // then order

  // Rigid shift against stretch on a real cage.
  const Hexahedron h = Hexahedron::FromBox(Vec3(0, 0, 0), Mat3::Identity(), Vec3(1, 0.5, 0.25));
  EditOp shift;
  shift.kind = OpKind::kTranslate;
  shift.operand = Operand::Part("p");
  shift.amount = SymExpr::Param("x");
  shift.axis = Vec3::UnitX();
  EditOp stretch = shift;
  stretch.kind = OpKind::kScale;
  const ParamAssignment sigma{{"x", 0.5}};
  const double e_shift = arap_energy(h.rest, apply_numeric(h.rest, {shift}, sigma));
  const double e_stretch = arap_energy(h.rest, apply_numeric(h.rest, {stretch}, sigma));
  expect({synthetic(0, e_stretch, 3, 0), synthetic(0, e_shift, 3, 1)}, 1);
  const bool rigid_ok = e_shift < kRigidArapTol && e_stretch > kRigidArapTol;
  return {failed == 0 && rigid_ok,
          std::to_string(5 - failed) + "/5 orderings, " + fmt("ARAP shift %.1e vs stretch %.3f", e_shift, e_stretch)};
}

Outcome ablation() {
  MetricOptions mo;
  const auto& cab = graph_of("cabinet");
  const auto cab_truth = parse_program(fixtures::scenario("cabinet_open").ground_truth);
  const auto cab_seeds = parse_program(fixtures::scenario("cabinet_open").seeds);
  PropagateOptions no_nhbd;
  no_nhbd.use_nhbd = false;
  const double d_full = d_geo(propagate(cab, cab_seeds).program, cab_truth, cab, mo);
  const double d_off = d_geo(propagate(cab, cab_seeds, no_nhbd).program, cab_truth, cab, mo);

  const auto& shelf = graph_of("shelf");
  const auto shelf_truth = parse_program(fixtures::scenario("shelf_widen").ground_truth);
  const auto shelf_seeds = parse_program(fixtures::scenario("shelf_widen").seeds);
  PropagateOptions no_breaking;
  no_breaking.use_breaking = false;
  const double r_full = pct_rel(propagate(shelf, shelf_seeds).program, shelf_truth, shelf, mo);
  const double r_off = pct_rel(propagate(shelf, shelf_seeds, no_breaking).program, shelf_truth, shelf, mo);
  return {d_off > d_full && r_off < r_full,
          fmt("cabinet d_geo %.3f -> %.3f without nhbd; ", d_full, d_off) +
              fmt("shelf pct_rel %.2f -> %.2f without breaking", r_full, r_off)};
}

Outcome performance() {
  const auto& rails = graph_of("rails50");
  const auto p = parse_program(fixtures::scenario("rails_widen").ground_truth);
  const ProgramEvaluator ev(rails, p);
  std::vector<double> ms;
  for (int k = 0; k < kEvalRepeats; ++k) {
    const auto t0 = Clock::now();
    auto d = ev.evaluate({{"x", static_cast<double>(k) / (kEvalRepeats - 1)}});
    ms.push_back(1e3 * seconds_since(t0));
    if (d.parts.empty()) return {false, "empty evaluation"};
  }
  std::nth_element(ms.begin(), ms.begin() + kEvalRepeats / 2, ms.end());
  const double median = ms[kEvalRepeats / 2];

  double slowest = 0.0;
  std::string slowest_name;
  for (const auto& sc : fixtures::scenarios()) {
    const auto t0 = Clock::now();
    propagate(graph_of(sc.fixture), parse_program(sc.seeds));
    const double s = seconds_since(t0);
    if (s > slowest) {
      slowest = s;
      slowest_name = sc.name;
    }
  }
  return {median < kEvalMedianBudgetMs && slowest < kPropagateBudgetSec,
          std::to_string(rails.size()) + fmt("-part eval median %.3f ms; slowest propagate %.3f s", median, slowest) +
              " (" + slowest_name + ")"};
}

Outcome metrics_identity() {
  int checked = 0;
  double worst = 0.0;
  for (const auto& sc : fixtures::scenarios()) {
    const auto& g = graph_of(sc.fixture);
    for (const auto& text : {sc.ground_truth, sc.seeds}) {
      const auto p = parse_program(text);
      auto r = evaluate_metrics(p, p, g);
      worst = std::max({worst, std::abs(r.j_prog - 1.0), std::abs(r.d_geo), std::abs(r.pct_rel - 100.0)});
      ++checked;
    }
  }
  return {worst <= kMetricTol, std::to_string(checked) + fmt(" programs, max deviation %.1e", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"identity at zero", identity},
      {"analytic vs numeric solver", solver_oracle},
      {"relation soundness", soundness},
      {"golden end-to-end", golden},
      {"symmetry conjugation", conjugation},
      {"program text round trip", round_trip},
      {"composition", composition},
      {"selection rules", selection},
      {"ablation direction", ablation},
      {"performance", performance},
      {"metrics self-identity", metrics_identity},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s [%2zu] %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}

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

#include <fstream>
#include <mutex>
#include <sstream>

#include <doctest.h>

#include "gen_program.hpp"
#include "shapeprog/aep.hpp"
#include "shapeprog/fixtures.hpp"
#include "shapeprog/metrics.hpp"

using namespace shapeprog;

namespace {

const ShapeGraph& graph_of(const std::string& name) {
  static std::map<std::string, ShapeGraph> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, build_graph(fixtures::by_name(name))).first;
  return it->second;
}

EditProgram truth(const std::string& scenario) { return parse_program(fixtures::scenario(scenario).ground_truth); }

}  // namespace

TEST_CASE("self comparison gives 1, 0, 100 on every scenario") {
  for (const auto& sc : fixtures::scenarios()) {
    CAPTURE(sc.name);
    const auto& g = graph_of(sc.fixture);
    auto gt = parse_program(sc.ground_truth);
    auto r = evaluate_metrics(gt, gt, g);
    CHECK(r.j_prog == 1.0);
    CHECK(r.d_geo == 0.0);
    CHECK(r.pct_rel == 100.0);
  }
}

TEST_CASE("j_prog overlap and amount agreement") {
  auto gt = parse_program(
      "param x [0, 1]\n"
      "op translate leg_fl -0.75*x {dir=1 0 0}\n"
      "op translate leg_fr -0.75*x {dir=-1 0 0}\n"
      "op translate leg_bl -0.75*x {dir=1 0 0}\n"
      "op translate leg_br -0.75*x {dir=-1 0 0}\n");
  auto p = gt;
  p.ops.pop_back();
  CHECK(j_prog(p, gt) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(j_prog(gt, p) == doctest::Approx(0.75).epsilon(1e-15));

  EditProgram empty;
  empty.params = gt.params;
  CHECK(j_prog(empty, gt) == 0.0);
  CHECK(j_prog(gt, empty) == 0.0);
  CHECK(j_prog(EditProgram{}, EditProgram{}) == 1.0);

  // Flipped direction with a negated amount is the same edit.
  auto flipped = gt;
  flipped.ops[0] = parse_program("param x [0, 1]\nop translate leg_fl 0.75*x {dir=-1 0 0}\n").ops[0];
  CHECK(j_prog(flipped, gt) == 1.0);
  // Scale axis sign is irrelevant.
  auto s1 = parse_program("param x [0, 1]\nop scale seat x {origin=0 0 0; axis=1 0 0}\n");
  auto s2 = parse_program("param x [0, 1]\nop scale seat x {origin=0 0 0; axis=-1 0 0}\n");
  CHECK(j_prog(s1, s2) == 1.0);

  // Two of four amounts disagree: full overlap, half agreement.
  auto off = gt;
  off.ops[0].amount = parse_expr("-0.7*x");
  off.ops[1].amount = parse_expr("-0.75*x + 0.01");
  CHECK(j_prog(off, gt) == doctest::Approx(0.5).epsilon(1e-15));
  // Below tolerance still agrees.
  off = gt;
  off.ops[0].amount = parse_expr("-0.75*x + 0.0005");
  CHECK(j_prog(off, gt) == 1.0);

  // Parameters align by position, not by name.
  auto renamed = parse_program(
      "param y [0, 1]\n"
      "op translate leg_fl -0.75*y {dir=1 0 0}\n"
      "op translate leg_fr -0.75*y {dir=-1 0 0}\n"
      "op translate leg_bl -0.75*y {dir=1 0 0}\n"
      "op translate leg_br -0.75*y {dir=-1 0 0}\n");
  CHECK(j_prog(renamed, gt) == 1.0);

  // A different operand feature is a different signature.
  auto face = gt;
  face.ops[0].operand = Operand::FeatureOf("leg_fl", Feature::kFace, 2);
  CHECK(j_prog(face, gt) == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
}

TEST_CASE("d_geo closed form for a constant extra offset") {
  for (const char* name : {"chair", "table", "lamp"}) {
    CAPTURE(name);
    const auto& g = graph_of(name);
    const std::string part = g.node(1).id;
    EditProgram gt = parse_program("param x [0, 1]\nop translate " + part + " x {dir=0 1 0}\n");
    EditProgram p = gt;
    EditOp extra;
    extra.kind = OpKind::kTranslate;
    extra.operand = Operand::Part(part);
    extra.amount = SymExpr(0.05 * g.diag);
    extra.axis = Vec3(0.6, 0.0, 0.8);
    p.ops.push_back(extra);
    // One part of N moves 0.05 diag at all 8 corners: mean is 0.05 diag / N.
    CHECK(d_geo(p, gt, g) == doctest::Approx(5.0 / g.size()).epsilon(1e-12));
    CHECK(d_geo(gt, p, g) == doctest::Approx(5.0 / g.size()).epsilon(1e-12));
  }
  const auto& chair = graph_of("chair");
  EditProgram identity;
  identity.params = truth("chair_widen").params;
  CHECK(d_geo(identity, truth("chair_widen"), chair) > 0.0);
}

TEST_CASE("d_geo triangle inequality on random programs") {
  const auto& g = graph_of("chair");
  testing::ProgramGenerator gen(99, g);
  for (int trial = 0; trial < 40; ++trial) {
    auto p1 = gen.program(2, 4, "p", false);
    auto p2 = gen.program(2, 3, "p", false);
    auto p3 = gen.program(2, 5, "p", false);
    p2.params = p1.params;
    p3.params = p1.params;
    const double d12 = d_geo(p1, p2, g), d23 = d_geo(p2, p3, g), d13 = d_geo(p1, p3, g);
    CHECK(d13 <= d12 + d23 + 1e-9);
    CHECK(d_geo(p1, p2, g) == d12);  // deterministic
    CHECK(d_geo(p2, p1, g) == doctest::Approx(d12).epsilon(1e-12));
  }
}

TEST_CASE("pct_rel counts matching relation states") {
  const auto& g = graph_of("cabinet");
  EditProgram rest;
  rest.params = {{"x", 0.0, 1.0}};
  // Pulling the handle off the door breaks only their attachment.
  auto pulled = parse_program("param x [0, 1]\nop translate handle x {dir=0 0 -1}\n");
  auto states = relation_states(g, pulled);
  int broken = 0;
  for (const auto& [id, ok] : states) broken += ok ? 0 : 1;
  REQUIRE(broken == 1);
  CHECK_FALSE(states.at("att_door_handle"));
  const double n = static_cast<double>(states.size());
  CHECK(pct_rel(pulled, rest, g) == doctest::Approx(100.0 * (n - 1) / n));
  CHECK(pct_rel(rest, pulled, g) == doctest::Approx(100.0 * (n - 1) / n));

  std::set<std::string, std::less<>> all;
  for (const auto& e : g.edges) all.insert(e.id);
  CHECK(pct_rel(pulled, rest, g.with_disabled(all)) == 100.0);
}

TEST_CASE("ablations move the metrics in the expected direction") {
  {
    const auto& g = graph_of("cabinet");
    auto seeds = parse_program(fixtures::scenario("cabinet_open").seeds);
    PropagateOptions off;
    off.use_nhbd = false;
    auto full = propagate(g, seeds).program;
    auto ablated = propagate(g, seeds, off).program;
    CHECK(d_geo(full, truth("cabinet_open"), g) < d_geo(ablated, truth("cabinet_open"), g));
  }
  {
    const auto& g = graph_of("shelf");
    auto seeds = parse_program(fixtures::scenario("shelf_widen").seeds);
    PropagateOptions off;
    off.use_breaking = false;
    auto full = propagate(g, seeds).program;
    auto ablated = propagate(g, seeds, off).program;
    CHECK(pct_rel(full, truth("shelf_widen"), g) > pct_rel(ablated, truth("shelf_widen"), g));
  }
}

TEST_CASE("metrics tolerate mismatched parameter lists") {
  const auto& g = graph_of("chair");
  auto a = truth("chair_widen");
  auto b = compose(a, a);  // two parameters
  CHECK_NOTHROW(evaluate_metrics(a, b, g));
  CHECK_NOTHROW(evaluate_metrics(b, a, g));
  CHECK(aligned_samples(b, a).front().first.size() == 2);
  CHECK(aligned_samples(b, a).front().first.at("x_2") == 0.0);
}

TEST_CASE("metrics csv") {
  CHECK(metrics_csv_header() == "label,j_prog,d_geo,pct_rel");
  CHECK(metrics_csv_row({"chair", {1.0, 0.0, 100.0}}) == "chair,1.000000,0.000000,100.0000");
  CHECK(metrics_csv_row({"a,\"b\"", {0.5, 1.25, 90.0}}) == "\"a,\"\"b\"\"\",0.500000,1.250000,90.0000");
  auto path = std::filesystem::temp_directory_path() / "shapeprog_metrics_test.csv";
  write_metrics_csv(path, {{"x", {}}, {"y", {0.75, 2.0, 50.0}}});
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "label,j_prog,d_geo,pct_rel\nx,1.000000,0.000000,100.0000\ny,0.750000,2.000000,50.0000\n");
  std::filesystem::remove(path);
}

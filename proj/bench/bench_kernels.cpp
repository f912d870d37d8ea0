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

#include <benchmark/benchmark.h>

#include "shapeprog/aep.hpp"
#include "shapeprog/fixtures.hpp"

using namespace shapeprog;

namespace {

const ShapeGraph& rails() {
  static const ShapeGraph g = build_graph(fixtures::rails50());
  return g;
}

const EditProgram& rails_program() {
  static const EditProgram p = parse_program(fixtures::scenario("rails_widen").ground_truth);
  return p;
}

void BM_Evaluate(benchmark::State& state, Exec exec) {
  const ProgramEvaluator ev(rails(), rails_program());
  double x = 0.0;
  for (auto _ : state) {
    auto d = ev.evaluate({{"x", x}}, exec);
    benchmark::DoNotOptimize(d);
    x = x < 1.0 ? x + 0.01 : 0.0;
  }
  state.SetItemsProcessed(state.iterations() * rails().size());
}

void BM_Propagate(benchmark::State& state, Exec exec, const char* scenario) {
  const auto& sc = fixtures::scenario(scenario);
  const ShapeGraph g = build_graph(fixtures::by_name(sc.fixture));
  const EditProgram seeds = parse_program(sc.seeds);
  PropagateOptions opts;
  opts.exec = exec;
  for (auto _ : state) {
    auto r = propagate(g, seeds, opts);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Evaluate, serial, Exec::kSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Evaluate, parallel, Exec::kParallel)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Propagate, chair_serial, Exec::kSerial, "chair_widen")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Propagate, chair_parallel, Exec::kParallel, "chair_widen")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Propagate, rails_serial, Exec::kSerial, "rails_widen")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Propagate, rails_parallel, Exec::kParallel, "rails_widen")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

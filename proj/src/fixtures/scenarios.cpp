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

#include <cstdio>

#include "shapeprog/fixtures.hpp"
#include "shapeprog/symbolic.hpp"

namespace shapeprog::fixtures {

namespace {

// Leg offsets over the seat half-width give the leg amounts (0.75 / 1); the
// back spans the same points as the seat and scales with it.
constexpr const char* kChairSeed =
    "param x [0, 1]\n"
    "op scale seat x {origin=0 0.5625 0; axis=1 0 0}\n";
constexpr const char* kChairGolden =
    "param x [0, 1]\n"
    "op scale seat x {origin=0 0.5625 0; axis=1 0 0}\n"
    "op translate leg_fl -0.75*x {dir=1 0 0}\n"
    "op translate leg_fr -0.75*x {dir=-1 0 0}\n"
    "op translate leg_bl -0.75*x {dir=1 0 0}\n"
    "op translate leg_br -0.75*x {dir=-1 0 0}\n"
    "op scale back x {origin=0 1.0625 0.5625; axis=1 0 0}\n";

constexpr const char* kTableSeed =
    "param x [0, 1]\n"
    "op scale top x {origin=0 1.0625 0; axis=1 0 0}\n";
constexpr const char* kTableTruth =
    "param x [0, 1]\n"
    "op scale top x {origin=0 1.0625 0; axis=1 0 0}\n"
    "op translate leg_fl -1.25*x {dir=1 0 0}\n"
    "op translate leg_fr -1.25*x {dir=-1 0 0}\n"
    "op translate leg_bl -1.25*x {dir=1 0 0}\n"
    "op translate leg_br -1.25*x {dir=-1 0 0}\n"
    "op translate stretcher_l -1.25*x {dir=1 0 0}\n"
    "op translate stretcher_r -1.25*x {dir=-1 0 0}\n";

// The handle follows the door about the hinge axis.
constexpr const char* kCabinetSeed =
    "param x [0, 1.5707963267948966]\n"
    "op rotate door x {origin=-0.5 0.75 -0.5625; axis=0 1 0}\n";
constexpr const char* kCabinetTruth =
    "param x [0, 1.5707963267948966]\n"
    "op rotate door x {origin=-0.5 0.75 -0.5625; axis=0 1 0}\n"
    "op rotate handle x {origin=-0.5 0.75 -0.5625; axis=0 1 0}\n";

constexpr const char* kBenchSeed =
    "param x [0, 1]\n"
    "op translate support_r x {dir=1 0 0}\n";
constexpr const char* kBenchTruth =
    "param x [0, 1]\n"
    "op translate support_r x {dir=1 0 0}\n"
    "op translate support_l x {dir=-1 0 0}\n"
    "op scale slat_0 x {origin=0 0.53125 -0.5; axis=1 0 0}\n"
    "op scale slat_1 x {origin=0 0.53125 -0.25; axis=1 0 0}\n"
    "op scale slat_2 x {origin=0 0.53125 0; axis=1 0 0}\n"
    "op scale slat_3 x {origin=0 0.53125 0.25; axis=1 0 0}\n"
    "op scale slat_4 x {origin=0 0.53125 0.5; axis=1 0 0}\n";

// Sides widen while the back moves away: no single op on a shelf keeps all
// three attachments, so the reference keeps the side contacts (scale by
// x / 0.9375) and lets the back contact break.
constexpr const char* kShelfSeed =
    "param x [0, 1]\n"
    "op translate side_l x {dir=-1 0 0}\n"
    "op translate side_r x {dir=1 0 0}\n"
    "op translate back x {dir=0 0 1}\n";
constexpr const char* kShelfTruth =
    "param x [0, 1]\n"
    "op translate side_l x {dir=-1 0 0}\n"
    "op translate side_r x {dir=1 0 0}\n"
    "op translate back x {dir=0 0 1}\n"
    "op scale shelf_top 1.0666666666666667*x {origin=0 1.53125 0; axis=1 0 0}\n"
    "op scale shelf_bottom 1.0666666666666667*x {origin=0 0.28125 0; axis=1 0 0}\n";

// Pole length 1.25 scaled from its foot carries the shade by 1.25 x.
constexpr const char* kLampSeed =
    "param x [0, 1]\n"
    "op scale pole x {origin=0 0.25 0; axis=0 1 0}\n";
constexpr const char* kLampTruth =
    "param x [0, 1]\n"
    "op scale pole x {origin=0 0.25 0; axis=0 1 0}\n"
    "op translate shade 1.25*x {dir=0 1 0}\n";

constexpr const char* kRailsSeed =
    "param x [0, 1]\n"
    "op translate rail_r x {dir=1 0 0}\n";

std::string rails_truth() {
  std::string s = std::string(kRailsSeed) + "op translate rail_l x {dir=-1 0 0}\n";
  for (int k = 0; k < 48; ++k) {
    double z = -2.9375 + 0.125 * k;
    char buf[128];
    std::snprintf(buf, sizeof buf, "op scale slat_%d x {origin=0 0.09375 %s; axis=1 0 0}\n", k,
                  format_number(z).c_str());
    s += buf;
  }
  return s;
}

}  // namespace

std::vector<Scenario> scenarios() {
  return {
      {"chair_widen", "chair", "widen the chair", kChairSeed, kChairGolden},
      {"table_widen", "table", "make the table wider", kTableSeed, kTableTruth},
      {"cabinet_open", "cabinet", "open the cabinet door", kCabinetSeed, kCabinetTruth},
      {"bench_widen", "bench", "make the bench wider", kBenchSeed, kBenchTruth},
      {"shelf_widen", "shelf", "widen the shelf and push the back away", kShelfSeed, kShelfTruth},
      {"lamp_raise", "lamp", "make the lamp taller", kLampSeed, kLampTruth},
      {"rails_widen", "rails50", "widen the walkway", kRailsSeed, rails_truth()},
  };
}

const Scenario& scenario(std::string_view name) {
  static const std::vector<Scenario> all = scenarios();
  for (const auto& s : all)
    if (s.name == name) return s;
  throw ShapeError("unknown scenario '" + std::string(name) + "'");
}

}  // namespace shapeprog::fixtures

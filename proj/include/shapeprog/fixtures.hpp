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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shapeprog/shape.hpp"

// Synthetic segmented shapes built from boxes with dyadic coordinates.
// Frame: +y up, front is -z, left is -x.
namespace shapeprog::fixtures {

SegmentedMesh chair();    // seat, 4 legs, one-piece back on two feet
SegmentedMesh table();    // top, 4 legs, 2 side stretchers
SegmentedMesh cabinet();  // body, hinge strip, door, handle
SegmentedMesh bench();    // 2 supports, 5 slats
SegmentedMesh shelf();    // 2 sides, back, top and bottom shelves
SegmentedMesh lamp();     // base, 3 feet at 120 degrees, pole, shade
SegmentedMesh rails50();  // 2 rails, 48 slats

/// The six fixtures used by the acceptance suite.
std::vector<std::string> names();
/// Any fixture above by name; throws ShapeError for unknown names.
SegmentedMesh by_name(std::string_view name);

/// Writes manifest.json plus one OBJ per part into `dir`.
/// Edit scenario on a fixture: seed program, the request it answers, and a
/// hand-derived reference program.
struct Scenario {
  std::string name;
  std::string fixture;
  std::string request;
  std::string seeds;         // program text
  std::string ground_truth;  // program text
};

std::vector<Scenario> scenarios();
const Scenario& scenario(std::string_view name);

void write_manifest(const SegmentedMesh& mesh, const std::filesystem::path& dir);

}  // namespace shapeprog::fixtures

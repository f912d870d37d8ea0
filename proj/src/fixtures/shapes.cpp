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

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>

#include "shapeprog/fixtures.hpp"

namespace shapeprog::fixtures {

namespace {

PartInput box(std::string id, std::string label, Vec3 lo, Vec3 hi) {
  return {std::move(id), std::move(label), box_mesh(lo, hi)};
}

}  // namespace

SegmentedMesh chair() {
  SegmentedMesh m;
  m.name = "chair";
  m.parts.push_back(box("seat", "seat", {-1, 0.5, -0.75}, {1, 0.625, 0.75}));
  const double h = 0.0625;
  const struct {
    const char* id;
    double x, z;
  } legs[4] = {{"leg_fl", -0.75, -0.5}, {"leg_fr", 0.75, -0.5}, {"leg_bl", -0.75, 0.5},
               {"leg_br", 0.75, 0.5}};
  for (const auto& l : legs)
    m.parts.push_back(box(l.id, "leg", {l.x - h, 0, l.z - h}, {l.x + h, 0.5, l.z + h}));
  // Back panel standing on two feet, one part.
  TriMesh back = merge_meshes({box_mesh({-0.75 - h, 0.625, 0.5}, {-0.75 + h, 0.75, 0.625}),
                               box_mesh({0.75 - h, 0.625, 0.5}, {0.75 + h, 0.75, 0.625}),
                               box_mesh({-1, 0.75, 0.5}, {1, 1.5, 0.625})});
  m.parts.push_back({"back", "back", back});
  return m;
}

SegmentedMesh table() {
  SegmentedMesh m;
  m.name = "table";
  m.parts.push_back(box("top", "top", {-1.5, 1.0, -0.75}, {1.5, 1.125, 0.75}));
  const double h = 0.0625;
  const struct {
    const char* id;
    double x, z;
  } legs[4] = {{"leg_fl", -1.25, -0.5}, {"leg_fr", 1.25, -0.5}, {"leg_bl", -1.25, 0.5},
               {"leg_br", 1.25, 0.5}};
  for (const auto& l : legs)
    m.parts.push_back(box(l.id, "leg", {l.x - h, 0, l.z - h}, {l.x + h, 1.0, l.z + h}));
  for (double x : {-1.25, 1.25})
    m.parts.push_back(box(x < 0 ? "stretcher_l" : "stretcher_r", "stretcher",
                          {x - h, 0.25, -0.4375}, {x + h, 0.375, 0.4375}));
  return m;
}

SegmentedMesh cabinet() {
  SegmentedMesh m;
  m.name = "cabinet";
  m.parts.push_back(box("body", "body", {-0.5625, 0, -0.5}, {0.5, 1.5, 0.5}));
  // The door hangs off a strip so its only contact is along the hinge line.
  m.parts.push_back(box("hinge", "hinge", {-0.5625, 0.0625, -0.59375}, {-0.5, 1.4375, -0.5}));
  m.parts.push_back(box("door", "door", {-0.5, 0.0625, -0.59375}, {0.5, 1.4375, -0.53125}));
  m.parts.push_back(
      box("handle", "handle", {0.3125, 0.625, -0.65625}, {0.375, 0.875, -0.59375}));
  return m;
}

SegmentedMesh bench() {
  SegmentedMesh m;
  m.name = "bench";
  m.parts.push_back(box("support_l", "support", {-1.125, 0, -0.625}, {-1, 0.5625, 0.625}));
  m.parts.push_back(box("support_r", "support", {1, 0, -0.625}, {1.125, 0.5625, 0.625}));
  for (int k = 0; k < 5; ++k) {
    double z = -0.5 + 0.25 * k;
    m.parts.push_back(box("slat_" + std::to_string(k), "slat", {-1, 0.5, z - 0.0625},
                          {1, 0.5625, z + 0.0625}));
  }
  return m;
}

SegmentedMesh shelf() {
  SegmentedMesh m;
  m.name = "shelf";
  m.parts.push_back(box("side_l", "side", {-1, 0, -0.5}, {-0.9375, 2, 0.5}));
  m.parts.push_back(box("side_r", "side", {0.9375, 0, -0.5}, {1, 2, 0.5}));
  m.parts.push_back(box("back", "back", {-1, 0, 0.5}, {1, 2, 0.5625}));
  m.parts.push_back(box("shelf_top", "shelf", {-0.9375, 1.5, -0.5}, {0.9375, 1.5625, 0.5}));
  m.parts.push_back(box("shelf_bottom", "shelf", {-0.9375, 0.25, -0.5}, {0.9375, 0.3125, 0.5}));
  return m;
}

SegmentedMesh lamp() {
  SegmentedMesh m;
  m.name = "lamp";
  m.parts.push_back(box("base", "base", {-0.375, 0.125, -0.375}, {0.375, 0.25, 0.375}));
  for (int k = 0; k < 3; ++k) {
    double th = 2.0 * std::numbers::pi * k / 3.0;
    Mat3 rot = rotation_about(Vec3::UnitY(), th);
    Vec3 center = rot * Vec3(0.25, 0.0625, 0.0);
    m.parts.push_back({"foot_" + std::to_string(k), "foot",
                       oriented_box_mesh(center, Vec3(0.125, 0.0625, 0.03125), rot)});
  }
  m.parts.push_back(box("pole", "pole", {-0.0625, 0.25, -0.0625}, {0.0625, 1.5, 0.0625}));
  m.parts.push_back(box("shade", "shade", {-0.375, 1.5, -0.375}, {0.375, 1.875, 0.375}));
  return m;
}

SegmentedMesh rails50() {
  SegmentedMesh m;
  m.name = "rails50";
  m.parts.push_back(box("rail_l", "rail", {-1.125, 0, -3}, {-1, 0.125, 3}));
  m.parts.push_back(box("rail_r", "rail", {1, 0, -3}, {1.125, 0.125, 3}));
  for (int k = 0; k < 48; ++k) {
    double z = -2.9375 + 0.125 * k;
    m.parts.push_back(box("slat_" + std::to_string(k), "slat", {-1, 0.0625, z - 0.03125},
                          {1, 0.125, z + 0.03125}));
  }
  return m;
}

std::vector<std::string> names() { return {"chair", "table", "cabinet", "bench", "shelf", "lamp"}; }

SegmentedMesh by_name(std::string_view name) {
  if (name == "chair") return chair();
  if (name == "table") return table();
  if (name == "cabinet") return cabinet();
  if (name == "bench") return bench();
  if (name == "shelf") return shelf();
  if (name == "lamp") return lamp();
  if (name == "rails50") return rails50();
  throw ShapeError("unknown fixture '" + std::string(name) + "'");
}

void write_manifest(const SegmentedMesh& mesh, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : mesh.parts) {
    std::string file = p.id + ".obj";
    write_obj(dir / file, p.mesh, p.id);
    parts.push_back({{"id", p.id}, {"label", p.label}, {"file", file}});
  }
  nlohmann::json root{{"name", mesh.name}, {"parts", parts}};
  std::ofstream(dir / "manifest.json") << root.dump(1) << "\n";
}

}  // namespace shapeprog::fixtures

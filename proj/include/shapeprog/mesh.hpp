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

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "shapeprog/geometry.hpp"

namespace shapeprog {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  Eigen::AlignedBox3d bounds() const;
};

class MeshIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads vertices and faces of a Wavefront OBJ file; polygons are fanned.
TriMesh read_obj(const std::filesystem::path& path);
TriMesh parse_obj(const std::string& text);

/// OBJ text with coordinates in fixed 6-decimal form (negative zero printed
/// as zero), so equal shapes hash equal.
std::string format_obj(const TriMesh& mesh, const std::string& object_name = "");
void write_obj(const std::filesystem::path& path, const TriMesh& mesh,
               const std::string& object_name = "");

/// Axis-aligned box mesh, 8 vertices / 12 outward-facing triangles.
TriMesh box_mesh(const Vec3& lo, const Vec3& hi);
/// Box centred at `center` with half extents `half`, rotated by `rot`.
TriMesh oriented_box_mesh(const Vec3& center, const Vec3& half, const Mat3& rot);
/// Concatenates meshes into one vertex/triangle list.
TriMesh merge_meshes(const std::vector<TriMesh>& meshes);

/// Edges shared by more than two triangles.
int count_nonmanifold_edges(const TriMesh& mesh);

/// Generalized winding number of `p` w.r.t. the closed triangle mesh.
double winding_number(const TriMesh& mesh, const Vec3& p);

}  // namespace shapeprog

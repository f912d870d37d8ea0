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

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <stdexcept>

namespace shapeprog {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
/// Cage corners, one row per corner.
using CageCorners = Eigen::Matrix<double, 8, 3>;
/// Per-point weights over the 8 cage corners.
using CageWeights = std::array<double, 8>;

// Corner convention. Corner c sits at local signs
//   u: (c & 1) ? + : -,  v: (c & 2) ? + : -,  w: (c & 4) ? + : -
// so corner 0 is (-,-,-) and corner 7 is (+,+,+).
//
// Faces: f = 2 * axis + side, axis in {u=0, v=1, w=2}, side 0 = negative.
//   0:-u 1:+u 2:-v 3:+v 4:-w 5:+w
// Edges: e = 4 * axis + k, the edge parallel to `axis`; k packs the two
// remaining corner bits, lower axis first.
//   0-3: along u (k = bv + 2 bw), 4-7: along v (k = bu + 2 bw),
//   8-11: along w (k = bu + 2 bv)
inline constexpr int kNumFaces = 6;
inline constexpr int kNumEdges = 12;
inline constexpr int kNumCorners = 8;

constexpr bool corner_positive(int corner, int axis) { return (corner >> axis) & 1; }

std::array<int, 4> face_corners(int face);
std::array<int, 2> edge_corners(int edge);

struct RigidTransform {
  Mat3 linear = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return linear * p + translation; }
  Vec3 apply_vector(const Vec3& v) const { return linear * v; }
  CageCorners apply(const CageCorners& c) const;
  RigidTransform inverse() const;
  RigidTransform then(const RigidTransform& next) const;  // next(this(p))
  bool is_reflection() const { return linear.determinant() < 0; }

  static RigidTransform Reflection(const Vec3& normal, double offset);
  static RigidTransform Translation(const Vec3& step);
  static RigidTransform Rotation(const Vec3& axis, const Vec3& center, double angle);
};

Mat3 rotation_about(const Vec3& axis, double angle);

/// Trilinear weights at local parameters (s, t, r) in [0, 1]^3.
CageWeights trilinear_weights(const Vec3& str);
Vec3 apply_weights(const CageWeights& w, const CageCorners& corners);

}  // namespace shapeprog

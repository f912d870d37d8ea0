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

#include "shapeprog/geometry.hpp"

namespace shapeprog {

std::array<int, 4> face_corners(int face) {
  const int axis = face / 2;
  const int side = face % 2;
  std::array<int, 4> out{};
  int n = 0;
  for (int c = 0; c < kNumCorners; ++c)
    if (static_cast<int>(corner_positive(c, axis)) == side) out[static_cast<std::size_t>(n++)] = c;
  return out;
}

std::array<int, 2> edge_corners(int edge) {
  const int axis = edge / 4;
  const int k = edge % 4;
  const int lo = k & 1, hi = (k >> 1) & 1;
  int base = 0;
  switch (axis) {
    case 0: base = (lo << 1) | (hi << 2); break;
    case 1: base = lo | (hi << 2); break;
    default: base = lo | (hi << 1); break;
  }
  return {base, base | (1 << axis)};
}

CageCorners RigidTransform::apply(const CageCorners& c) const {
  CageCorners out;
  for (int i = 0; i < kNumCorners; ++i)
    out.row(i) = (linear * c.row(i).transpose() + translation).transpose();
  return out;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.linear = linear.transpose();
  inv.translation = -(inv.linear * translation);
  return inv;
}

RigidTransform RigidTransform::then(const RigidTransform& next) const {
  RigidTransform out;
  out.linear = next.linear * linear;
  out.translation = next.linear * translation + next.translation;
  return out;
}

RigidTransform RigidTransform::Reflection(const Vec3& normal, double offset) {
  RigidTransform t;
  Vec3 n = normal.normalized();
  t.linear = Mat3::Identity() - 2.0 * n * n.transpose();
  t.translation = 2.0 * offset * n;
  return t;
}

RigidTransform RigidTransform::Translation(const Vec3& step) {
  RigidTransform t;
  t.translation = step;
  return t;
}

RigidTransform RigidTransform::Rotation(const Vec3& axis, const Vec3& center,
                                        double angle) {
  RigidTransform t;
  t.linear = rotation_about(axis, angle);
  t.translation = center - t.linear * center;
  return t;
}

Mat3 rotation_about(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

CageWeights trilinear_weights(const Vec3& str) {
  CageWeights w{};
  for (int c = 0; c < kNumCorners; ++c) {
    double v = 1.0;
    for (int a = 0; a < 3; ++a) v *= corner_positive(c, a) ? str[a] : 1.0 - str[a];
    w[static_cast<std::size_t>(c)] = v;
  }
  return w;
}

Vec3 apply_weights(const CageWeights& w, const CageCorners& corners) {
  Vec3 p = Vec3::Zero();
  for (int c = 0; c < kNumCorners; ++c)
    p += w[static_cast<std::size_t>(c)] * corners.row(c).transpose();
  return p;
}

}  // namespace shapeprog

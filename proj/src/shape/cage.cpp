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

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "shapeprog/shape.hpp"

namespace shapeprog {

Hexahedron Hexahedron::FromBox(const Vec3& center, const Mat3& axes, const Vec3& half,
                               bool planar) {
  Hexahedron h;
  h.center = center;
  h.axes = axes;
  h.half = half;
  h.planar = planar;
  for (int c = 0; c < kNumCorners; ++c) {
    Vec3 p = center;
    for (int a = 0; a < 3; ++a)
      p += (corner_positive(c, a) ? half[a] : -half[a]) * axes.col(a);
    h.rest.row(c) = p.transpose();
  }
  return h;
}

Hexahedron Hexahedron::FromCorners(const CageCorners& corners) {
  Hexahedron h;
  h.rest = corners;
  h.center = cage_center(corners);
  Mat3 dirs;
  for (int a = 0; a < 3; ++a) {
    Vec3 sum = Vec3::Zero();
    for (int c = 0; c < kNumCorners; ++c)
      if (!corner_positive(c, a))
        sum += (corners.row(c | (1 << a)) - corners.row(c)).transpose();
    dirs.col(a) = sum / 4.0;
    h.half[a] = 0.5 * dirs.col(a).norm();
  }
  // Orthonormalize in u, v, w order; w follows from right-handedness.
  Vec3 u = dirs.col(0).normalized();
  Vec3 v = (dirs.col(1) - dirs.col(1).dot(u) * u).normalized();
  h.axes.col(0) = u;
  h.axes.col(1) = v;
  h.axes.col(2) = u.cross(v);
  return h;
}

double Hexahedron::volume() const {
  // Sum of six tetrahedra around the 0-7 diagonal.
  static constexpr int kTets[6][2] = {{1, 3}, {3, 2}, {2, 6}, {6, 4}, {4, 5}, {5, 1}};
  const Vec3 p0 = corner(0), p7 = corner(7);
  double vol = 0.0;
  for (const auto& t : kTets)
    vol += (corner(t[0]) - p0).cross(corner(t[1]) - p0).dot(p7 - p0) / 6.0;
  return std::abs(vol);
}

Vec3 cage_center(const CageCorners& c) { return c.colwise().mean().transpose(); }

Vec3 face_center(const CageCorners& c, int face) {
  Vec3 p = Vec3::Zero();
  for (int k : face_corners(face)) p += c.row(k).transpose();
  return p / 4.0;
}

Vec3 edge_midpoint(const CageCorners& c, int edge) {
  auto [a, b] = edge_corners(edge);
  return 0.5 * (c.row(a) + c.row(b)).transpose();
}

namespace {

// Minimum-area orientation of the points projected into the plane spanned
// by e0, e1; returns the rotated pair.
std::pair<Vec3, Vec3> best_planar_pair(const std::vector<Vec3>& pts, const Vec3& mean,
                                       const Vec3& e0, const Vec3& e1) {
  double best_area = std::numeric_limits<double>::infinity();
  double best = 0.0;
  for (int k = 0; k < 180; ++k) {
    double th = k * std::numbers::pi / 360.0;
    Vec3 a = std::cos(th) * e0 + std::sin(th) * e1;
    Vec3 b = -std::sin(th) * e0 + std::cos(th) * e1;
    double lo_a = 1e300, hi_a = -1e300, lo_b = 1e300, hi_b = -1e300;
    for (const auto& p : pts) {
      double pa = (p - mean).dot(a), pb = (p - mean).dot(b);
      lo_a = std::min(lo_a, pa);
      hi_a = std::max(hi_a, pa);
      lo_b = std::min(lo_b, pb);
      hi_b = std::max(hi_b, pb);
    }
    double area = (hi_a - lo_a) * (hi_b - lo_b);
    if (area < best_area * (1.0 - 1e-9)) {
      best_area = area;
      best = th;
    }
  }
  return {std::cos(best) * e0 + std::sin(best) * e1, -std::sin(best) * e0 + std::cos(best) * e1};
}

}  // namespace

Hexahedron fit_cage(const TriMesh& mesh, double diag, const ShapeOptions& opts) {
  const auto& pts = mesh.vertices;
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(pts.size());

  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  Vec3 ev = es.eigenvalues();
  Mat3 vecs = es.eigenvectors();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  auto same = [&](int i, int j) { return std::abs(ev[i] - ev[j]) <= 1e-6 * scale; };

  Mat3 axes = vecs;
  if (same(0, 1) && same(1, 2)) {
    axes = Mat3::Identity();
  } else if (same(0, 1) || same(1, 2)) {
    // One distinct axis; resolve the degenerate plane by minimum area.
    int lone = same(0, 1) ? 2 : 0;
    int p0 = same(0, 1) ? 0 : 1, p1 = same(0, 1) ? 1 : 2;
    auto [a, b] = best_planar_pair(pts, mean, vecs.col(p0), vecs.col(p1));
    axes.col(0) = vecs.col(lone);
    axes.col(1) = a;
    axes.col(2) = b;
  }

  // Snap to global axes within tolerance, keeping snapped axes first.
  const double cos_snap = std::cos(opts.snap_degrees * std::numbers::pi / 180.0);
  std::vector<Vec3> snapped, free;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = axes.col(k).normalized();
    int g = 0;
    e.cwiseAbs().maxCoeff(&g);
    if (std::abs(e[g]) >= cos_snap) {
      Vec3 s = Vec3::Zero();
      s[g] = 1.0;
      snapped.push_back(s);
    } else {
      free.push_back(e);
    }
  }
  std::vector<Vec3> basis = snapped;
  for (auto e : free) {
    for (const auto& b : basis) e -= e.dot(b) * b;
    basis.push_back(e.normalized());
  }
  if (basis.size() == 3 && snapped.size() == 2) basis[2] = basis[0].cross(basis[1]);

  // Assign basis vectors to u, v, w by best alignment with x, y, z.
  static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                       {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  double best = -1.0;
  int best_perm = 0;
  for (int p = 0; p < 6; ++p) {
    double score = 0.0;
    for (int a = 0; a < 3; ++a) score += std::abs(basis[static_cast<std::size_t>(kPerms[p][a])][a]);
    if (score > best + 1e-12) {
      best = score;
      best_perm = p;
    }
  }
  Mat3 frame;
  for (int a = 0; a < 3; ++a) frame.col(a) = basis[static_cast<std::size_t>(kPerms[best_perm][a])];
  if (frame(0, 0) < 0) frame.col(0) = -frame.col(0);
  if (frame(1, 1) < 0) frame.col(1) = -frame.col(1);
  frame.col(2) = frame.col(0).cross(frame.col(1));

  Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
  for (const auto& p : pts) {
    Vec3 l = frame.transpose() * p;
    lo = lo.cwiseMin(l);
    hi = hi.cwiseMax(l);
  }
  Vec3 half = 0.5 * (hi - lo);
  bool planar = false;
  for (int a = 0; a < 3; ++a) {
    if (2.0 * half[a] < opts.planar_frac * diag) {
      half[a] = 0.5 * opts.min_thickness_frac * diag;
      planar = true;
    }
  }
  Vec3 center = frame * (0.5 * (lo + hi));
  return Hexahedron::FromBox(center, frame, half, planar);
}

Vec3 invert_trilinear(const CageCorners& corners, const Vec3& p) {
  Vec3 q = Vec3::Constant(0.5);
  for (int it = 0; it < 100; ++it) {
    CageWeights w = trilinear_weights(q);
    Vec3 f = apply_weights(w, corners) - p;
    Mat3 J = Mat3::Zero();
    for (int c = 0; c < kNumCorners; ++c) {
      Vec3 x = corners.row(c).transpose();
      for (int a = 0; a < 3; ++a) {
        double d = corner_positive(c, a) ? 1.0 : -1.0;
        for (int b = 0; b < 3; ++b)
          if (b != a) d *= corner_positive(c, b) ? q[b] : 1.0 - q[b];
        J.col(a) += d * x;
      }
    }
    Eigen::FullPivLU<Mat3> lu(J);
    if (!lu.isInvertible()) throw ShapeError("degenerate cage in trilinear inversion");
    Vec3 dq = lu.solve(f);
    q -= dq;
    if (dq.cwiseAbs().maxCoeff() < 1e-15) break;
  }
  return q;
}

CageWeights cage_coordinates(const Hexahedron& cage, const Vec3& p, double margin) {
  Vec3 q = invert_trilinear(cage.rest, p);
  for (int a = 0; a < 3; ++a) {
    double len = std::max(2.0 * cage.half[a], 1e-300);
    double m = margin / len;
    if (q[a] < -m || q[a] > 1.0 + m) throw OutsideCage();
  }
  return trilinear_weights(q);
}

}  // namespace shapeprog

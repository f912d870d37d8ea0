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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "shapeprog/shape.hpp"

namespace shapeprog {

namespace {

struct Primitive {
  Vec3 centroid;
  double weight;
  Eigen::AlignedBox3d box;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

double box_distance(const Eigen::AlignedBox3d& a, const Eigen::AlignedBox3d& b) {
  Vec3 gap = (a.min() - b.max()).cwiseMax(b.min() - a.max()).cwiseMax(0.0);
  return gap.norm();
}

// Weighted centroids of primitive clusters whose boxes lie within eps,
// ordered by first primitive.
std::vector<Vec3> cluster_centroids(const std::vector<Primitive>& prims, double eps) {
  UnionFind uf(prims.size());
  for (std::size_t i = 0; i < prims.size(); ++i)
    for (std::size_t j = i + 1; j < prims.size(); ++j)
      if (box_distance(prims[i].box, prims[j].box) <= eps)
        uf.unite(static_cast<int>(i), static_cast<int>(j));
  std::vector<int> roots;
  std::vector<Vec3> sums;
  std::vector<double> weights;
  for (std::size_t i = 0; i < prims.size(); ++i) {
    int r = uf.find(static_cast<int>(i));
    auto it = std::find(roots.begin(), roots.end(), r);
    std::size_t k = static_cast<std::size_t>(it - roots.begin());
    if (it == roots.end()) {
      roots.push_back(r);
      sums.push_back(Vec3::Zero());
      weights.push_back(0.0);
    }
    sums[k] += prims[i].weight * prims[i].centroid;
    weights[k] += prims[i].weight;
  }
  std::vector<Vec3> out;
  for (std::size_t k = 0; k < roots.size(); ++k) out.push_back(sums[k] / weights[k]);
  return out;
}

Vec3 vtx(const TriMesh& m, int i) { return m.vertices[static_cast<std::size_t>(i)]; }

std::vector<Primitive> overlap_cells(const TriMesh& ma, const TriMesh& mb,
                                     const Eigen::AlignedBox3d& inter) {
  constexpr int kGrid = 16;
  const Vec3 size = inter.sizes() / kGrid;
  std::vector<Primitive> cells;
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j)
      for (int k = 0; k < kGrid; ++k) {
        Vec3 lo = inter.min() + Vec3(i * size.x(), j * size.y(), k * size.z());
        Vec3 c = lo + 0.5 * size;
        // Points on a boundary score 0.5; require clear interiors.
        if (winding_number(ma, c) > 0.75 && winding_number(mb, c) > 0.75)
          cells.push_back({c, 1.0, Eigen::AlignedBox3d(lo, lo + size)});
      }
  return cells;
}

std::vector<Vec3> clip_to_triangle(std::vector<Vec3> poly, const Vec3& a, const Vec3& b,
                                   const Vec3& c, const Vec3& n) {
  const Vec3 tri[3] = {a, b, c};
  for (int e = 0; e < 3 && !poly.empty(); ++e) {
    const Vec3& p0 = tri[e];
    const Vec3& p1 = tri[(e + 1) % 3];
    Vec3 inward = n.cross(p1 - p0);
    std::vector<Vec3> out;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Vec3& s = poly[k];
      const Vec3& t = poly[(k + 1) % poly.size()];
      double ds = (s - p0).dot(inward), dt = (t - p0).dot(inward);
      if (ds >= 0) out.push_back(s);
      if ((ds >= 0) != (dt >= 0)) out.push_back(s + (t - s) * (ds / (ds - dt)));
    }
    poly = std::move(out);
  }
  return poly;
}

std::vector<Primitive> face_contacts(const TriMesh& ma, const TriMesh& mb, double eps,
                                     double min_area) {
  const double cos_tol = std::cos(5.0 * std::numbers::pi / 180.0);
  std::vector<Primitive> out;
  for (const auto& ta : ma.triangles) {
    Vec3 a0 = vtx(ma, ta[0]), a1 = vtx(ma, ta[1]), a2 = vtx(ma, ta[2]);
    Vec3 na = (a1 - a0).cross(a2 - a0);
    if (na.norm() == 0.0) continue;
    na.normalize();
    Eigen::AlignedBox3d ba(a0);
    ba.extend(a1);
    ba.extend(a2);
    for (const auto& tb : mb.triangles) {
      Vec3 b0 = vtx(mb, tb[0]), b1 = vtx(mb, tb[1]), b2 = vtx(mb, tb[2]);
      Eigen::AlignedBox3d bb(b0);
      bb.extend(b1);
      bb.extend(b2);
      if (box_distance(ba, bb) > eps) continue;
      Vec3 nb = (b1 - b0).cross(b2 - b0);
      if (nb.norm() == 0.0) continue;
      nb.normalize();
      if (na.dot(nb) > -cos_tol) continue;
      bool close = true;
      for (const Vec3& p : {a0, a1, a2})
        if (std::abs((p - b0).dot(nb)) > eps) close = false;
      if (!close) continue;
      std::vector<Vec3> poly;
      for (const Vec3& p : {a0, a1, a2}) poly.push_back(p - (p - b0).dot(nb) * nb);
      poly = clip_to_triangle(std::move(poly), b0, b1, b2, nb);
      if (poly.size() < 3) continue;
      double area = 0.0;
      Vec3 centroid = Vec3::Zero();
      Eigen::AlignedBox3d box(poly[0]);
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        double ar = 0.5 * (poly[k] - poly[0]).cross(poly[k + 1] - poly[0]).norm();
        area += ar;
        centroid += ar * (poly[0] + poly[k] + poly[k + 1]) / 3.0;
      }
      for (const auto& p : poly) box.extend(p);
      if (area <= min_area) continue;
      out.push_back({centroid / area, area, box});
    }
  }
  return out;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Closest point by region classification.
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.norm();
  Vec3 bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.norm();
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + ab * (d1 / (d1 - d3)))).norm();
  Vec3 cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.norm();
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + ac * (d2 / (d2 - d6)))).norm();
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return (p - (b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))))).norm();
  double denom = 1.0 / (va + vb + vc);
  return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

void near_vertices(const TriMesh& from, const TriMesh& to, double eps,
                   std::vector<Primitive>& out) {
  for (const auto& p : from.vertices) {
    for (const auto& t : to.triangles) {
      if (point_triangle_distance(p, vtx(to, t[0]), vtx(to, t[1]), vtx(to, t[2])) <= eps) {
        out.push_back({p, 1.0, Eigen::AlignedBox3d(p, p)});
        break;
      }
    }
  }
}

}  // namespace

std::vector<RelationEdge> detect_attachments(const std::vector<PartNode>& nodes,
                                             double contact_eps, double margin) {
  std::vector<RelationEdge> out;
  std::vector<Eigen::AlignedBox3d> boxes;
  for (const auto& n : nodes) boxes.push_back(n.mesh.bounds());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (box_distance(boxes[i], boxes[j]) > contact_eps) continue;
      const auto& ma = nodes[i].mesh;
      const auto& mb = nodes[j].mesh;
      std::vector<Vec3> centroids;
      Eigen::AlignedBox3d inter = boxes[i].intersection(boxes[j]);
      if (!inter.isEmpty() && inter.sizes().minCoeff() > contact_eps) {
        auto cells = overlap_cells(ma, mb, inter);
        if (!cells.empty()) centroids = cluster_centroids(cells, 0.0);
      }
      if (centroids.empty()) {
        auto faces = face_contacts(ma, mb, contact_eps, 1e-6 * contact_eps * contact_eps);
        if (!faces.empty()) centroids = cluster_centroids(faces, contact_eps);
      }
      if (centroids.empty()) {
        std::vector<Primitive> pts;
        near_vertices(ma, mb, contact_eps, pts);
        near_vertices(mb, ma, contact_eps, pts);
        if (!pts.empty()) centroids = cluster_centroids(pts, contact_eps);
      }
      if (centroids.empty()) continue;
      AttachmentRelation rel;
      rel.a = static_cast<int>(i);
      rel.b = static_cast<int>(j);
      for (const auto& c : centroids) {
        try {
          rel.points.push_back({cage_coordinates(nodes[i].cage, c, margin),
                                cage_coordinates(nodes[j].cage, c, margin), c});
        } catch (const OutsideCage&) {
        }
      }
      if (rel.points.empty()) continue;
      out.push_back({"att_" + nodes[i].id + "_" + nodes[j].id, rel, true});
    }
  }
  return out;
}

}  // namespace shapeprog

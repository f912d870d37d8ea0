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
#include <set>

#include "shapeprog/dsl.hpp"

namespace shapeprog {

namespace {

SymExpr C(double v) { return SymExpr(v); }

SymExpr dot(const SymVec3& a, const Vec3& b) {
  return a.x * C(b.x()) + a.y * C(b.y()) + a.z * C(b.z());
}

SymVec3 sub(const SymVec3& a, const Vec3& b) {
  return {a.x - C(b.x()), a.y - C(b.y()), a.z - C(b.z())};
}

SymVec3 add_scaled(const SymVec3& a, const SymExpr& s, const Vec3& d) {
  return {a.x + s * C(d.x()), a.y + s * C(d.y()), a.z + s * C(d.z())};
}

}  // namespace

SymVec3 apply_op_symbolic(const EditOp& op, const SymVec3& p) {
  const SymExpr& a = op.amount;
  switch (op.kind) {
    case OpKind::kTranslate:
      return add_scaled(p, a, op.axis);
    case OpKind::kScale:
      return add_scaled(p, a * dot(sub(p, op.origin), op.axis), op.axis);
    case OpKind::kShear:
      return add_scaled(p, a * dot(sub(p, op.origin), op.normal), op.axis);
    case OpKind::kRotate: {
      // Rodrigues: v cos + (k x v) sin + k (k . v)(1 - cos), v = p - o.
      const Vec3& k = op.axis;
      SymVec3 v = sub(p, op.origin);
      SymExpr c = cos(a), s = sin(a);
      SymExpr kv = dot(v, k);
      SymExpr one_c = C(1.0) - c;
      SymVec3 kxv{C(k.y()) * v.z - C(k.z()) * v.y, C(k.z()) * v.x - C(k.x()) * v.z,
                  C(k.x()) * v.y - C(k.y()) * v.x};
      auto comp = [&](const SymExpr& vi, const SymExpr& kxvi, double ki, double oi) {
        return C(oi) + vi * c + kxvi * s + C(ki) * kv * one_c;
      };
      return {comp(v.x, kxv.x, k.x(), op.origin.x()), comp(v.y, kxv.y, k.y(), op.origin.y()),
              comp(v.z, kxv.z, k.z(), op.origin.z())};
    }
    default:
      return p;
  }
}

SymMatrix symbolic_apply(const CageCorners& rest, const std::vector<EditOp>& ops) {
  std::vector<SymVec3> pts;
  for (int c = 0; c < 8; ++c) pts.push_back({C(rest(c, 0)), C(rest(c, 1)), C(rest(c, 2))});
  for (const auto& op : ops) {
    if (is_group_op(op.kind)) continue;
    for (int c : op.operand.corners()) {
      SymVec3 q = apply_op_symbolic(op, pts[static_cast<std::size_t>(c)]);
      pts[static_cast<std::size_t>(c)] = {simplify(q.x), simplify(q.y), simplify(q.z)};
    }
  }
  SymMatrix m(8, 3);
  for (int c = 0; c < 8; ++c) {
    m(c, 0) = pts[static_cast<std::size_t>(c)].x;
    m(c, 1) = pts[static_cast<std::size_t>(c)].y;
    m(c, 2) = pts[static_cast<std::size_t>(c)].z;
  }
  return m;
}

CageCorners apply_numeric(const CageCorners& rest, const std::vector<EditOp>& ops,
                          const ParamAssignment& sigma) {
  CageCorners out = rest;
  for (const auto& op : ops) {
    if (is_group_op(op.kind)) continue;
    const double a = eval(op.amount, sigma);
    Eigen::Affine3d t = Eigen::Affine3d::Identity();
    switch (op.kind) {
      case OpKind::kTranslate:
        t = Eigen::Translation3d(a * op.axis);
        break;
      case OpKind::kScale: {
        Mat3 l = Mat3::Identity() + a * op.axis * op.axis.transpose();
        t = Eigen::Translation3d(op.origin) * l * Eigen::Translation3d(-op.origin);
        break;
      }
      case OpKind::kShear: {
        Mat3 l = Mat3::Identity() + a * op.axis * op.normal.transpose();
        t = Eigen::Translation3d(op.origin) * l * Eigen::Translation3d(-op.origin);
        break;
      }
      case OpKind::kRotate:
        t = Eigen::Translation3d(op.origin) * Eigen::AngleAxisd(a, op.axis) *
            Eigen::Translation3d(-op.origin);
        break;
      default:
        break;
    }
    for (int c : op.operand.corners()) out.row(c) = (t * Vec3(out.row(c).transpose())).transpose();
  }
  return out;
}

std::vector<EditOp> ops_on_part(const EditProgram& p, std::string_view part_id) {
  std::vector<EditOp> out;
  for (const auto& op : p.ops)
    if (!op.operand.relation && op.operand.name == part_id) out.push_back(op);
  return out;
}

std::vector<SymMatrix> cage_functions(const ShapeGraph& g, const EditProgram& p) {
  std::vector<SymMatrix> out;
  for (const auto& np : g.nodes) out.push_back(symbolic_apply(np->cage.rest, ops_on_part(p, np->id)));
  return out;
}

double default_tau(const EditOp& op, const ShapeGraph& g, const ToleranceDefaults& d) {
  switch (op.kind) {
    case OpKind::kTranslate:
    case OpKind::kShear: return d.translate_frac * g.diag;
    case OpKind::kScale: return d.scale;
    case OpKind::kRotate: return d.rotate;
    case OpKind::kSymGroupCount:
    case OpKind::kSymGroupSpacing: {
      int r = g.find_relation(op.operand.name);
      if (r < 0) return 1.0;
      const auto& e = g.edges[static_cast<std::size_t>(r)];
      if (!e.is_symmetry()) return 1.0;
      if (op.kind == OpKind::kSymGroupCount)
        return static_cast<double>(e.symmetry().members.size());
      // Spacing: up to one rest step (or one rest angle).
      const auto& s = e.symmetry();
      return s.type == SymmetryType::kRotation ? s.angle : s.step.norm();
    }
  }
  return 1.0;
}

EditProgram compose(const EditProgram& p1, const EditProgram& p2) {
  EditProgram out = p1;
  std::set<std::string> taken;
  for (const auto& c : p1.params) taken.insert(c.name);
  for (const auto& c : p2.params) taken.insert(c.name);
  std::map<std::string, SymExpr, std::less<>> renames;
  std::set<std::string> used;
  for (const auto& c : p1.params) used.insert(c.name);
  for (const auto& c : p2.params) {
    ControlParam nc = c;
    if (used.count(c.name)) {
      for (int k = 2;; ++k) {
        std::string cand = c.name + "_" + std::to_string(k);
        if (!taken.count(cand) && !used.count(cand)) {
          nc.name = cand;
          break;
        }
      }
      renames.emplace(c.name, SymExpr::Param(nc.name));
    }
    used.insert(nc.name);
    out.params.push_back(nc);
  }
  for (auto op : p2.ops) {
    if (!renames.empty()) op.amount = substitute(op.amount, renames);
    out.ops.push_back(op);
  }
  return out;
}

}  // namespace shapeprog

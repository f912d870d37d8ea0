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

#include "shapeprog/dsl.hpp"

namespace shapeprog {

ProgramEvaluator::ProgramEvaluator(const ShapeGraph& g, const EditProgram& p)
    : graph_(g), program_(p), slots_(p.param_names()) {
  validate(p, g);
  code_.resize(g.nodes.size());
  for (int i = 0; i < g.size(); ++i) {
    auto ops = ops_on_part(p, g.node(i).id);
    if (ops.empty()) continue;
    SymMatrix m = symbolic_apply(g.node(i).cage.rest, ops);
    auto& pc = code_[static_cast<std::size_t>(i)];
    pc.edited = true;
    for (int c = 0; c < 8; ++c)
      for (int a = 0; a < 3; ++a)
        pc.entries[static_cast<std::size_t>(c * 3 + a)] = CompiledExpr(m(c, a), slots_);
  }
  for (const auto& op : p.ops) {
    if (!is_group_op(op.kind)) continue;
    int r = g.find_relation(op.operand.name);
    auto it = std::find_if(groups_.begin(), groups_.end(),
                           [&](const GroupCode& gc) { return gc.relation == r; });
    if (it == groups_.end()) {
      groups_.push_back({r, {}, {}});
      it = groups_.end() - 1;
    }
    (op.kind == OpKind::kSymGroupCount ? it->count : it->spacing)
        .emplace_back(op.amount, slots_);
  }
}

std::vector<double> ProgramEvaluator::slot_values(const ParamAssignment& sigma,
                                                  std::vector<std::string>* warnings) const {
  std::vector<double> v;
  v.reserve(slots_.size());
  for (const auto& c : program_.params) {
    auto it = sigma.find(c.name);
    double x = it == sigma.end() ? 0.0 : it->second;
    double clamped = std::clamp(x, c.lo, c.hi);
    if (clamped != x && warnings)
      warnings->push_back("parameter '" + c.name + "' clamped to [" + format_number(c.lo) +
                          ", " + format_number(c.hi) + "]");
    v.push_back(clamped);
  }
  return v;
}

void ProgramEvaluator::eval_part(int i, std::span<const double> values, DeformedPart& out) const {
  const PartNode& n = graph_.node(i);
  const auto& pc = code_[static_cast<std::size_t>(i)];
  out.part = i;
  out.instance = 0;
  if (pc.edited) {
    for (int c = 0; c < 8; ++c)
      for (int a = 0; a < 3; ++a) out.cage(c, a) = pc.entries[static_cast<std::size_t>(c * 3 + a)](values);
  } else {
    out.cage = n.cage.rest;
  }
  out.vertices.resize(n.cage_coords.size());
  for (std::size_t v = 0; v < n.cage_coords.size(); ++v)
    out.vertices[v] = apply_weights(n.cage_coords[v], out.cage);
}

namespace {

void transform_part(DeformedPart& p, const RigidTransform& t) {
  p.cage = t.apply(p.cage);
  for (auto& v : p.vertices) v = t.apply(v);
}

}  // namespace

void ProgramEvaluator::apply_groups(std::span<const double> values, DeformedShape& out) const {
  std::vector<bool> removed(out.parts.size(), false);
  std::vector<DeformedPart> added;
  for (const auto& gc : groups_) {
    const auto& rel = graph_.edges[static_cast<std::size_t>(gc.relation)].symmetry();
    double count_amount = 0.0, spacing = 0.0;
    for (const auto& e : gc.count) count_amount += e(values);
    for (const auto& e : gc.spacing) spacing += e(values);
    const int rest = static_cast<int>(rel.members.size());
    const int count = std::max(1, static_cast<int>(std::floor(rest + count_amount + 0.5)));
    const DeformedPart proto = out.parts[static_cast<std::size_t>(rel.members[0])];

    // Original members move from their rest slot to slot k of the edited
    // layout; members past the rest count are copies of member 0.
    Vec3 unit = rel.type == SymmetryType::kTranslation ? rel.step.normalized() : Vec3::Zero();
    const double angle_step =
        (count == rest ? rel.angle : 2.0 * std::numbers::pi / count) + spacing;
    for (int k = 0; k < std::max(rest, count); ++k) {
      if (k >= count) {
        removed[static_cast<std::size_t>(rel.members[static_cast<std::size_t>(k)])] = true;
        continue;
      }
      if (k < rest) {
        double shift = rel.type == SymmetryType::kTranslation ? k * spacing
                                                              : k * (angle_step - rel.angle);
        if (shift == 0.0) continue;
        RigidTransform t = rel.type == SymmetryType::kTranslation
                               ? RigidTransform::Translation(shift * unit)
                               : RigidTransform::Rotation(rel.axis, rel.center, shift);
        transform_part(out.parts[static_cast<std::size_t>(rel.members[static_cast<std::size_t>(k)])], t);
      } else {
        RigidTransform t = rel.type == SymmetryType::kTranslation
                               ? RigidTransform::Translation(k * (rel.step + spacing * unit))
                               : RigidTransform::Rotation(rel.axis, rel.center, k * angle_step);
        DeformedPart fresh = proto;
        fresh.instance = k;
        transform_part(fresh, t);
        added.push_back(std::move(fresh));
      }
    }
  }
  std::vector<DeformedPart> kept;
  kept.reserve(out.parts.size() + added.size());
  for (std::size_t i = 0; i < out.parts.size(); ++i)
    if (!removed[i]) kept.push_back(std::move(out.parts[i]));
  for (auto& a : added) kept.push_back(std::move(a));
  out.parts = std::move(kept);
}

DeformedShape ProgramEvaluator::evaluate(const ParamAssignment& sigma, Exec exec) const {
  DeformedShape out;
  std::vector<double> values = slot_values(sigma, &out.warnings);
  const int n = graph_.size();
  out.parts.resize(static_cast<std::size_t>(n));
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) eval_part(i, values, out.parts[static_cast<std::size_t>(i)]);
  } else {
    for (int i = 0; i < n; ++i) eval_part(i, values, out.parts[static_cast<std::size_t>(i)]);
  }
  if (!groups_.empty()) apply_groups(values, out);
  return out;
}

std::vector<CageCorners> ProgramEvaluator::cages(const ParamAssignment& sigma) const {
  std::vector<double> values = slot_values(sigma, nullptr);
  std::vector<CageCorners> out(graph_.nodes.size());
  for (int i = 0; i < graph_.size(); ++i) {
    const auto& pc = code_[static_cast<std::size_t>(i)];
    if (!pc.edited) {
      out[static_cast<std::size_t>(i)] = graph_.node(i).cage.rest;
      continue;
    }
    for (int c = 0; c < 8; ++c)
      for (int a = 0; a < 3; ++a)
        out[static_cast<std::size_t>(i)](c, a) = pc.entries[static_cast<std::size_t>(c * 3 + a)](values);
  }
  return out;
}

DeformedShape evaluate(const EditProgram& p, const ShapeGraph& g, const ParamAssignment& sigma) {
  return ProgramEvaluator(g, p).evaluate(sigma);
}

TriMesh deformed_mesh(const DeformedShape& d, const ShapeGraph& g) {
  std::vector<TriMesh> parts;
  for (const auto& p : d.parts) {
    TriMesh m;
    m.vertices = p.vertices;
    m.triangles = g.node(p.part).mesh.triangles;
    parts.push_back(std::move(m));
  }
  return merge_meshes(parts);
}

std::vector<std::filesystem::path> export_meshes(const DeformedShape& d, const ShapeGraph& g,
                                                 const std::filesystem::path& dir, bool merged) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  if (merged) {
    written.push_back(dir / "shape.obj");
    write_obj(written.back(), deformed_mesh(d, g), g.name.empty() ? "shape" : g.name);
    return written;
  }
  for (const auto& p : d.parts) {
    const std::string& id = g.node(p.part).id;
    std::string name = p.instance == 0 ? id : id + "_" + std::to_string(p.instance);
    TriMesh m;
    m.vertices = p.vertices;
    m.triangles = g.node(p.part).mesh.triangles;
    written.push_back(dir / (name + ".obj"));
    write_obj(written.back(), m, name);
  }
  return written;
}

}  // namespace shapeprog

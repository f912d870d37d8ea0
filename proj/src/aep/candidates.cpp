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

#include <array>

#include "shapeprog/aep.hpp"

namespace shapeprog {

std::string_view hint_keyword(HintKind k) {
  switch (k) {
    case HintKind::kTranslate: return "translate";
    case HintKind::kRotate: return "rotate";
    case HintKind::kScale: return "scale";
  }
  return "";
}

std::optional<HintKind> hint_from_keyword(std::string_view s) {
  for (HintKind k : {HintKind::kTranslate, HintKind::kRotate, HintKind::kScale})
    if (hint_keyword(k) == s) return k;
  return std::nullopt;
}

bool hint_admits(HintKind hint, OpKind kind) {
  switch (hint) {
    case HintKind::kTranslate: return kind == OpKind::kTranslate;
    case HintKind::kRotate: return kind == OpKind::kRotate;
    case HintKind::kScale: return kind == OpKind::kScale || kind == OpKind::kShear;
  }
  return false;
}

namespace {

struct Features {
  Vec3 center;
  std::array<Vec3, 6> faces;
  std::array<Vec3, 12> edges;
  std::array<Vec3, 3> axes;
};

Features features_of(const Hexahedron& h) {
  Features f;
  f.center = cage_center(h.rest);
  for (int k = 0; k < kNumFaces; ++k) f.faces[static_cast<std::size_t>(k)] = face_center(h.rest, k);
  for (int k = 0; k < kNumEdges; ++k) f.edges[static_cast<std::size_t>(k)] = edge_midpoint(h.rest, k);
  for (int k = 0; k < 3; ++k) f.axes[static_cast<std::size_t>(k)] = h.axes.col(k);
  return f;
}

/// Appends the feature-derived candidate set of `src` applied to `part_id`.
void feature_candidates(const Features& f, const std::string& part_id, bool with_global,
                        Provenance prov, std::vector<CandidateEdit>& out) {
  auto make = [&](OpKind kind, const Vec3& origin, const Vec3& axis, const Vec3& normal) {
    CandidateEdit c;
    c.op.kind = kind;
    c.op.operand = Operand::Part(part_id);
    c.op.amount = SymExpr::Param(std::string(kUnknownAmount));
    c.op.origin = origin;
    c.op.axis = axis;
    c.op.normal = normal;
    c.provenance = prov;
    out.push_back(std::move(c));
  };
  for (const auto& a : f.axes) make(OpKind::kTranslate, Vec3::Zero(), a, Vec3::UnitY());
  if (with_global)
    for (int k = 0; k < 3; ++k) make(OpKind::kTranslate, Vec3::Zero(), Vec3::Unit(k), Vec3::UnitY());

  std::vector<Vec3> scale_origins{f.center};
  scale_origins.insert(scale_origins.end(), f.faces.begin(), f.faces.end());
  for (const auto& o : scale_origins)
    for (const auto& a : f.axes) make(OpKind::kScale, o, a, Vec3::UnitY());

  std::vector<Vec3> rot_origins = scale_origins;
  rot_origins.insert(rot_origins.end(), f.edges.begin(), f.edges.end());
  for (const auto& o : rot_origins)
    for (const auto& a : f.axes) make(OpKind::kRotate, o, a, Vec3::UnitY());

  for (int n = 0; n < 3; ++n)
    for (int d = 0; d < 3; ++d)
      if (n != d)
        make(OpKind::kShear, f.center, f.axes[static_cast<std::size_t>(d)],
             f.axes[static_cast<std::size_t>(n)]);
}

}  // namespace

std::vector<CandidateEdit> enumerate_candidates(const ShapeGraph& g, int part,
                                                std::optional<HintKind> hint,
                                                std::span<const int> neighbors, bool use_nhbd,
                                                const EditProgram* program) {
  const PartNode& n = g.node(part);
  std::vector<CandidateEdit> all;
  feature_candidates(features_of(n.cage), n.id, true, Provenance::kSelf, all);
  if (use_nhbd) {
    for (int nb : neighbors) {
      const PartNode& m = g.node(nb);
      if (program) {
        for (const auto& op : ops_on_part(*program, m.id)) {
          CandidateEdit c;
          c.op = op;
          c.op.operand = Operand::Part(n.id);
          c.op.amount = SymExpr::Param(std::string(kUnknownAmount));
          c.provenance = Provenance::kNeighbor;
          all.push_back(std::move(c));
        }
      }
      feature_candidates(features_of(m.cage), n.id, false, Provenance::kNeighbor, all);
    }
  }
  if (!hint) return all;
  std::vector<CandidateEdit> kept;
  for (auto& c : all)
    if (hint_admits(*hint, c.op.kind)) kept.push_back(std::move(c));
  return kept;
}

}  // namespace shapeprog

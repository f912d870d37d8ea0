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
#include <map>

#include "shapeprog/shape.hpp"

namespace shapeprog {

std::string PartNode::display_name() const {
  return phrase.empty() ? label : phrase + " " + label;
}

int ShapeGraph::find_part(std::string_view id) const {
  for (int i = 0; i < size(); ++i)
    if (nodes[static_cast<std::size_t>(i)]->id == id) return i;
  return -1;
}

int ShapeGraph::find_relation(std::string_view id) const {
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].id == id) return static_cast<int>(i);
  return -1;
}

ShapeGraph ShapeGraph::with_disabled(const std::set<std::string, std::less<>>& ids) const {
  ShapeGraph view = *this;
  for (auto& e : view.edges)
    if (ids.count(e.id)) e.enabled = false;
  return view;
}

bool is_valid_part_id(std::string_view id) {
  if (id.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(id[0])) return false;
  return std::all_of(id.begin(), id.end(),
                     [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

void assign_directional_phrases(std::vector<PartNode>& nodes, double diag) {
  // Axis order in the phrase: vertical, depth, lateral.
  struct AxisWords {
    int axis;
    const char* neg;
    const char* pos;
  };
  static constexpr AxisWords kAxes[3] = {{1, "bottom", "top"}, {2, "front", "back"},
                                         {0, "left", "right"}};
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < nodes.size(); ++i) groups[nodes[i].label].push_back(i);
  for (auto& n : nodes) n.phrase.clear();
  for (const auto& [label, members] : groups) {
    if (members.size() < 2) continue;
    std::vector<std::vector<std::string>> words(members.size());
    for (const auto& aw : kAxes) {
      double lo = 1e300, hi = -1e300;
      for (auto m : members) {
        lo = std::min(lo, nodes[m].cage.center[aw.axis]);
        hi = std::max(hi, nodes[m].cage.center[aw.axis]);
      }
      const double range = hi - lo;
      if (range <= 0.02 * diag) continue;
      const double mid = 0.5 * (lo + hi);
      for (std::size_t k = 0; k < members.size(); ++k) {
        double v = nodes[members[k]].cage.center[aw.axis];
        if (v < mid - 0.1 * range)
          words[k].push_back(aw.neg);
        else if (v > mid + 0.1 * range)
          words[k].push_back(aw.pos);
        else
          words[k].push_back("middle");
      }
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
      std::string p;
      for (const auto& w : words[k]) p += (p.empty() ? "" : " ") + w;
      nodes[members[k]].phrase = p;
    }
  }
}

ShapeGraph build_graph(const SegmentedMesh& input, const ShapeOptions& opts) {
  if (input.parts.empty()) throw ShapeError("segmented mesh has no parts");
  ShapeGraph g;
  g.name = input.name;
  Eigen::AlignedBox3d all;
  for (const auto& p : input.parts) {
    if (!is_valid_part_id(p.id)) throw ShapeError("invalid part id '" + p.id + "'");
    if (p.mesh.vertices.empty()) throw EmptyPart(p.id);
    all.extend(p.mesh.bounds());
  }
  for (std::size_t i = 0; i < input.parts.size(); ++i)
    for (std::size_t j = i + 1; j < input.parts.size(); ++j)
      if (input.parts[i].id == input.parts[j].id)
        throw ShapeError("duplicate part id '" + input.parts[i].id + "'");
  g.diag = all.diagonal().norm();
  if (g.diag <= 0.0) g.diag = 1.0;
  g.delta = opts.relation_tol_frac * g.diag;
  g.contact_eps = opts.contact_frac * g.diag;
  g.cage_margin = opts.cage_margin_frac * g.diag;

  std::vector<PartNode> nodes;
  for (const auto& p : input.parts) {
    PartNode n;
    n.id = p.id;
    n.label = p.label;
    n.mesh = p.mesh;
    if (int bad = count_nonmanifold_edges(p.mesh); bad > 0)
      g.warnings.push_back("NonManifoldIgnored: part '" + p.id + "' has " +
                           std::to_string(bad) + " non-manifold edges");
    n.cage = fit_cage(p.mesh, g.diag, opts);
    n.cage_coords.reserve(p.mesh.vertices.size());
    for (const auto& v : p.mesh.vertices)
      n.cage_coords.push_back(cage_coordinates(n.cage, v, g.cage_margin));
    nodes.push_back(std::move(n));
  }
  assign_directional_phrases(nodes, g.diag);
  g.edges = detect_symmetries(nodes, all.center(), g.delta, opts);
  auto att = detect_attachments(nodes, g.contact_eps, g.cage_margin);
  g.edges.insert(g.edges.end(), att.begin(), att.end());

  std::map<std::string, int> seen;
  for (auto& e : g.edges) {
    int n = ++seen[e.id];
    if (n > 1) e.id += "_" + std::to_string(n);
  }
  for (auto& n : nodes) g.nodes.push_back(std::make_shared<const PartNode>(std::move(n)));
  return g;
}

double rest_residual(const ShapeGraph& g, const RelationEdge& e) {
  double worst = 0.0;
  if (e.is_symmetry()) {
    const auto& s = e.symmetry();
    const RigidTransform t = s.transform();
    for (const auto& p : s.pairs) {
      RigidTransform tp;
      for (int k = 0; k < p.power; ++k) tp = tp.then(t);
      CageCorners mapped = tp.apply(g.node(p.b).cage.rest);
      for (int k = 0; k < 8; ++k)
        worst = std::max(worst, (g.node(p.a).cage.rest.row(p.perm[static_cast<std::size_t>(k)]) -
                                 mapped.row(k))
                                    .cwiseAbs()
                                    .maxCoeff());
    }
  } else {
    const auto& a = e.attachment();
    for (const auto& pt : a.points) {
      Vec3 pa = apply_weights(pt.on_a, g.node(a.a).cage.rest);
      Vec3 pb = apply_weights(pt.on_b, g.node(a.b).cage.rest);
      worst = std::max(worst, (pa - pb).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace shapeprog

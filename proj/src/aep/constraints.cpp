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

#include "shapeprog/aep.hpp"

namespace shapeprog {

SymMatrix transform_rows(const RigidTransform& t, const SymMatrix& m) {
  SymMatrix out(m.rows(), 3);
  for (int r = 0; r < m.rows(); ++r)
    for (int a = 0; a < 3; ++a) {
      SymExpr e(t.translation[a]);
      for (int b = 0; b < 3; ++b)
        if (t.linear(a, b) != 0.0) e = e + SymExpr(t.linear(a, b)) * m(r, b);
      out(r, a) = simplify(e);
    }
  return out;
}

namespace {

RigidTransform power_of(const RigidTransform& t, int power) {
  RigidTransform base = power < 0 ? t.inverse() : t;
  RigidTransform out;
  for (int k = 0; k < std::abs(power); ++k) out = out.then(base);
  return out;
}

Vec3 row_point(const CageCorners& c, const CageWeights& w) { return apply_weights(w, c); }

}  // namespace

std::vector<Constraint> relation_constraints(const ShapeGraph& g, int edge,
                                             const std::vector<SymMatrix>& cages, int target) {
  const RelationEdge& e = g.edges[static_cast<std::size_t>(edge)];
  std::vector<Constraint> out;
  if (e.is_symmetry()) {
    const auto& s = e.symmetry();
    const RigidTransform t = s.transform();
    for (const auto& pr : s.pairs) {
      Constraint c;
      c.source = e.id;
      c.kind = ConstraintKind::kSymmetry;
      c.delta = g.delta;
      c.part_a = pr.a;
      c.part_b = pr.b;
      const SymMatrix& ha = cages[static_cast<std::size_t>(pr.a)];
      SymMatrix hb = transform_rows(power_of(t, pr.power), cages[static_cast<std::size_t>(pr.b)]);
      c.residual = SymMatrix(8, 3);
      for (int k = 0; k < 8; ++k)
        for (int a = 0; a < 3; ++a)
          c.residual(k, a) = simplify(ha(pr.perm[static_cast<std::size_t>(k)], a) - hb(k, a));
      if (target == pr.a) {
        c.target_sign = 1;
        for (int k = 0; k < 8; ++k)
          c.target_rest.push_back(g.node(pr.a).cage.corner(pr.perm[static_cast<std::size_t>(k)]));
      }
      out.push_back(std::move(c));
    }
    return out;
  }
  const auto& att = e.attachment();
  Constraint c;
  c.source = e.id;
  c.kind = ConstraintKind::kAttachment;
  c.delta = g.delta;
  c.part_a = att.a;
  c.part_b = att.b;
  c.residual = SymMatrix(0, 3);
  const SymMatrix& ha = cages[static_cast<std::size_t>(att.a)];
  const SymMatrix& hb = cages[static_cast<std::size_t>(att.b)];
  for (const auto& pt : att.points) {
    SymMatrix ra = ha.weighted_row(pt.on_a);
    SymMatrix rb = hb.weighted_row(pt.on_b);
    SymMatrix row(1, 3);
    for (int a = 0; a < 3; ++a) row(0, a) = simplify(ra(0, a) - rb(0, a));
    c.residual.append_rows(row);
    if (target == att.a) c.target_rest.push_back(row_point(g.node(att.a).cage.rest, pt.on_a));
    if (target == att.b) c.target_rest.push_back(row_point(g.node(att.b).cage.rest, pt.on_b));
  }
  if (target == att.a) c.target_sign = 1;
  if (target == att.b) c.target_sign = -1;
  out.push_back(std::move(c));
  return out;
}

bool check_sat(const SymMatrix& residual, double delta, const ParamRanges& ranges, int n_samples,
               std::uint64_t seed) {
  auto ok = [&](const ParamAssignment& sigma) {
    try {
      double v = residual.norm_inf(sigma);
      return std::isfinite(v) && v < delta;
    } catch (const std::exception&) {
      return false;
    }
  };
  ParamAssignment lo, hi;
  for (const auto& [name, r] : ranges) {
    lo[name] = r.lo;
    hi[name] = r.hi;
  }
  if (!ok(lo) || !ok(hi)) return false;
  UniformSampler rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    ParamAssignment sigma;
    for (const auto& [name, r] : ranges) sigma[name] = rng.next(r.lo, r.hi);
    if (!ok(sigma)) return false;
  }
  return true;
}

bool check_sat(const Constraint& c, const ParamRanges& ranges, int n_samples, std::uint64_t seed) {
  return check_sat(c.residual, c.delta, ranges, n_samples, seed);
}

bool relation_holds(const ShapeGraph& g, int edge, const std::vector<SymMatrix>& cages,
                    const ParamRanges& ranges, int n_samples, std::uint64_t seed) {
  for (const auto& c : relation_constraints(g, edge, cages))
    if (!check_sat(c, ranges, n_samples, seed)) return false;
  return true;
}

namespace {

double clean(double v) {
  if (std::abs(v) < 1e-12) return 0.0;
  if (std::abs(v - 1.0) < 1e-12) return 1.0;
  if (std::abs(v + 1.0) < 1e-12) return -1.0;
  return v + 0.0;
}

Vec3 clean_dir(const Vec3& v) {
  Vec3 n = v.normalized();
  Vec3 c(clean(n.x()), clean(n.y()), clean(n.z()));
  return c.isApprox(n, 1e-11) ? c.normalized() : n;
}

Vec3 clean_point(const Vec3& p) {
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    // Snap to a 2^-20 grid when within rounding noise of it.
    double q = std::round(p[a] * 1048576.0) / 1048576.0;
    out[a] = std::abs(q - p[a]) < 1e-12 ? q + 0.0 : p[a];
  }
  return out;
}

}  // namespace

EditOp conjugate(const EditOp& op, const RigidTransform& t) {
  EditOp out = op;
  const double det = t.linear.determinant() < 0 ? -1.0 : 1.0;
  switch (op.kind) {
    case OpKind::kTranslate:
      out.axis = clean_dir(t.apply_vector(op.axis));
      break;
    case OpKind::kScale:
      out.origin = clean_point(t.apply(op.origin));
      out.axis = clean_dir(t.apply_vector(op.axis));
      break;
    case OpKind::kShear:
      out.origin = clean_point(t.apply(op.origin));
      out.axis = clean_dir(t.apply_vector(op.axis));
      out.normal = clean_dir(t.apply_vector(op.normal));
      break;
    case OpKind::kRotate:
      out.origin = clean_point(t.apply(op.origin));
      out.axis = clean_dir(det * t.apply_vector(op.axis));
      break;
    default:
      break;
  }
  return out;
}

std::optional<Operand> map_operand(const Operand& o, const std::array<int, 8>& perm,
                                   const std::string& target) {
  if (o.relation) return std::nullopt;
  if (o.feature == Feature::kWhole) return Operand::Part(target);
  std::vector<int> mapped;
  for (int c : o.corners()) mapped.push_back(perm[static_cast<std::size_t>(c)]);
  std::sort(mapped.begin(), mapped.end());
  auto same = [&](auto arr) {
    std::vector<int> v(arr.begin(), arr.end());
    std::sort(v.begin(), v.end());
    return v == mapped;
  };
  switch (o.feature) {
    case Feature::kFace:
      for (int f = 0; f < kNumFaces; ++f)
        if (same(face_corners(f))) return Operand::FeatureOf(target, Feature::kFace, f);
      break;
    case Feature::kEdge:
      for (int e = 0; e < kNumEdges; ++e)
        if (same(edge_corners(e))) return Operand::FeatureOf(target, Feature::kEdge, e);
      break;
    case Feature::kCorner:
      return Operand::FeatureOf(target, Feature::kCorner, mapped[0]);
    default:
      break;
  }
  return std::nullopt;
}

std::vector<SymMatrix> program_cages(const ShapeGraph& g, const EditProgram& p) {
  return cage_functions(g, p);
}

std::map<std::string, bool, std::less<>> relation_states(const ShapeGraph& g, const EditProgram& p,
                                                         int n_samples, std::uint64_t seed) {
  auto cages = program_cages(g, p);
  auto ranges = p.ranges();
  std::map<std::string, bool, std::less<>> out;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!g.edges[e].enabled) continue;
    out[g.edges[e].id] = relation_holds(g, static_cast<int>(e), cages, ranges, n_samples, seed);
  }
  return out;
}

}  // namespace shapeprog

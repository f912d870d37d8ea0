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
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "shapeprog/shape.hpp"

namespace shapeprog {

RigidTransform SymmetryRelation::transform() const {
  switch (type) {
    case SymmetryType::kReflection: return RigidTransform::Reflection(normal, offset);
    case SymmetryType::kTranslation: return RigidTransform::Translation(step);
    case SymmetryType::kRotation: return RigidTransform::Rotation(axis, center, angle);
  }
  return {};
}

namespace {

std::array<int, 8> compose_perm(const std::array<int, 8>& outer, const std::array<int, 8>& inner) {
  std::array<int, 8> out{};
  for (int k = 0; k < 8; ++k) out[static_cast<std::size_t>(k)] = outer[static_cast<std::size_t>(inner[static_cast<std::size_t>(k)])];
  return out;
}

std::array<int, 8> invert_perm(const std::array<int, 8>& p) {
  std::array<int, 8> out{};
  for (int k = 0; k < 8; ++k) out[static_cast<std::size_t>(p[static_cast<std::size_t>(k)])] = k;
  return out;
}

RigidTransform power_of(const RigidTransform& t, int n) {
  RigidTransform out;
  RigidTransform step = n >= 0 ? t : t.inverse();
  for (int k = 0; k < std::abs(n); ++k) out = out.then(step);
  return out;
}

}  // namespace

std::optional<std::pair<RigidTransform, std::array<int, 8>>> SymmetryRelation::map_between(
    int from, int to) const {
  const RigidTransform t = transform();
  if (type == SymmetryType::kReflection) {
    for (const auto& p : pairs) {
      // H_a[perm[k]] = T(H_b[k]); T is an involution.
      if (p.b == from && p.a == to) return std::make_pair(t, p.perm);
      if (p.a == from && p.b == to) return std::make_pair(t, invert_perm(p.perm));
    }
    return std::nullopt;
  }
  auto ia = std::find(members.begin(), members.end(), from);
  auto ib = std::find(members.begin(), members.end(), to);
  if (ia == members.end() || ib == members.end() || ia == ib) return std::nullopt;
  const int i = static_cast<int>(ia - members.begin());
  const int j = static_cast<int>(ib - members.begin());
  // pairs[k] links members k+1 (a) and k (b).
  std::array<int, 8> perm{0, 1, 2, 3, 4, 5, 6, 7};
  if (j > i) {
    for (int k = i; k < j; ++k) perm = compose_perm(pairs[static_cast<std::size_t>(k)].perm, perm);
  } else {
    for (int k = i - 1; k >= j; --k)
      perm = compose_perm(invert_perm(pairs[static_cast<std::size_t>(k)].perm), perm);
  }
  return std::make_pair(power_of(t, j - i), perm);
}

std::vector<int> RelationEdge::parts() const {
  if (is_symmetry()) {
    std::vector<int> out = symmetry().members;
    std::sort(out.begin(), out.end());
    return out;
  }
  return {attachment().a, attachment().b};
}

std::string RelationEdge::kind_name() const {
  if (!is_symmetry()) return "attachment";
  switch (symmetry().type) {
    case SymmetryType::kReflection: return "reflection";
    case SymmetryType::kTranslation: return "translation";
    case SymmetryType::kRotation: return "rotation";
  }
  return "";
}

namespace {

std::optional<std::array<int, 8>> match_corners(const CageCorners& target,
                                                const CageCorners& mapped, double tol) {
  std::array<int, 8> perm{};
  std::array<bool, 8> used{};
  for (int k = 0; k < 8; ++k) {
    int found = -1;
    for (int i = 0; i < 8; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      if ((target.row(i) - mapped.row(k)).cwiseAbs().maxCoeff() < tol) {
        found = i;
        break;
      }
    }
    if (found < 0) return std::nullopt;
    used[static_cast<std::size_t>(found)] = true;
    perm[static_cast<std::size_t>(k)] = found;
  }
  return perm;
}

bool congruent(const Hexahedron& a, const Hexahedron& b, double frac, double delta) {
  std::array<double, 3> ha{a.half[0], a.half[1], a.half[2]};
  std::array<double, 3> hb{b.half[0], b.half[1], b.half[2]};
  std::sort(ha.begin(), ha.end());
  std::sort(hb.begin(), hb.end());
  for (int k = 0; k < 3; ++k) {
    double d = std::abs(ha[static_cast<std::size_t>(k)] - hb[static_cast<std::size_t>(k)]);
    if (d > frac * std::max(ha[static_cast<std::size_t>(k)], hb[static_cast<std::size_t>(k)]) + delta) return false;
  }
  return true;
}

// Label-and-shape clusters, in order of first member.
std::vector<std::vector<int>> congruence_clusters(const std::vector<PartNode>& nodes,
                                                  double frac, double delta) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    bool placed = false;
    for (auto& c : clusters) {
      const auto& rep = nodes[static_cast<std::size_t>(c.front())];
      if (rep.label == nodes[static_cast<std::size_t>(i)].label &&
          congruent(rep.cage, nodes[static_cast<std::size_t>(i)].cage, frac, delta)) {
        c.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({i});
  }
  return clusters;
}

// Consecutive pairs m[k+1] ~ T(m[k]); empty when any pair fails.
std::vector<SymmetryPair> chain_pairs(const std::vector<PartNode>& nodes,
                                      const std::vector<int>& members,
                                      const RigidTransform& t, double delta) {
  std::vector<SymmetryPair> pairs;
  for (std::size_t k = 0; k + 1 < members.size(); ++k) {
    const auto& src = nodes[static_cast<std::size_t>(members[k])].cage.rest;
    const auto& dst = nodes[static_cast<std::size_t>(members[k + 1])].cage.rest;
    auto perm = match_corners(dst, t.apply(src), delta);
    if (!perm) return {};
    pairs.push_back({members[k + 1], members[k], *perm, 1});
  }
  return pairs;
}

std::optional<SymmetryRelation> translational_group(const std::vector<PartNode>& nodes,
                                                    const std::vector<int>& cluster,
                                                    double delta, const ShapeOptions& opts) {
  std::vector<Vec3> centers;
  Vec3 mean = Vec3::Zero();
  for (int i : cluster) {
    centers.push_back(nodes[static_cast<std::size_t>(i)].cage.center);
    mean += centers.back();
  }
  mean /= static_cast<double>(centers.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& c : centers) cov += (c - mean) * (c - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  Vec3 dir = es.eigenvectors().col(2);
  int dom = 0;
  dir.cwiseAbs().maxCoeff(&dom);
  if (dir[dom] < 0) dir = -dir;

  std::vector<int> order(cluster.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return centers[static_cast<std::size_t>(a)].dot(dir) < centers[static_cast<std::size_t>(b)].dot(dir);
  });
  std::vector<int> members;
  for (int k : order) members.push_back(cluster[static_cast<std::size_t>(k)]);

  std::vector<double> gaps;
  Vec3 step = Vec3::Zero();
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    Vec3 d = centers[static_cast<std::size_t>(order[k + 1])] - centers[static_cast<std::size_t>(order[k])];
    gaps.push_back(d.norm());
    step += d;
  }
  step /= static_cast<double>(gaps.size());
  double gmean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
  if (gmean <= delta) return std::nullopt;
  double var = 0.0;
  for (double g : gaps) var += (g - gmean) * (g - gmean);
  double cv = std::sqrt(var / static_cast<double>(gaps.size())) / gmean;
  if (cv >= opts.spacing_cv) return std::nullopt;

  SymmetryRelation rel;
  rel.type = SymmetryType::kTranslation;
  rel.step = step;
  rel.members = members;
  rel.pairs = chain_pairs(nodes, members, rel.transform(), delta);
  if (rel.pairs.empty()) return std::nullopt;
  return rel;
}

std::optional<SymmetryRelation> rotational_group(const std::vector<PartNode>& nodes,
                                                 const std::vector<int>& cluster,
                                                 double delta) {
  const int n = static_cast<int>(cluster.size());
  Vec3 mean = Vec3::Zero();
  for (int i : cluster) mean += nodes[static_cast<std::size_t>(i)].cage.center;
  mean /= n;
  std::vector<double> theta;
  double r0 = -1.0;
  for (int i : cluster) {
    Vec3 d = nodes[static_cast<std::size_t>(i)].cage.center - mean;
    double r = std::hypot(d.x(), d.z());
    if (r <= delta) return std::nullopt;
    if (r0 < 0) r0 = r;
    if (std::abs(r - r0) > delta) return std::nullopt;
    // Positive rotation about +y increases this angle.
    theta.push_back(std::atan2(-d.z(), d.x()));
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return theta[static_cast<std::size_t>(a)] < theta[static_cast<std::size_t>(b)];
  });
  // Start the cycle at the lowest part index.
  auto first = std::min_element(order.begin(), order.end(), [&](int a, int b) {
    return cluster[static_cast<std::size_t>(a)] < cluster[static_cast<std::size_t>(b)];
  });
  std::rotate(order.begin(), first, order.end());
  std::vector<int> members;
  for (int k : order) members.push_back(cluster[static_cast<std::size_t>(k)]);

  SymmetryRelation rel;
  rel.type = SymmetryType::kRotation;
  rel.axis = Vec3::UnitY();
  rel.center = mean;
  rel.angle = 2.0 * std::numbers::pi / n;
  rel.members = members;
  rel.pairs = chain_pairs(nodes, members, rel.transform(), delta);
  if (rel.pairs.empty()) return std::nullopt;
  return rel;
}

}  // namespace

std::vector<RelationEdge> detect_symmetries(const std::vector<PartNode>& nodes,
                                            const Vec3& shape_center, double delta,
                                            const ShapeOptions& opts) {
  std::vector<RelationEdge> groups;
  std::vector<int> group_of(nodes.size(), -1);
  for (const auto& cluster : congruence_clusters(nodes, opts.congruence_frac, delta)) {
    if (cluster.size() < 3) continue;
    auto rel = translational_group(nodes, cluster, delta, opts);
    std::string prefix = "trans_";
    if (!rel) {
      rel = rotational_group(nodes, cluster, delta);
      prefix = "rot_";
    }
    if (!rel) continue;
    for (int m : rel->members) group_of[static_cast<std::size_t>(m)] = static_cast<int>(groups.size());
    groups.push_back({prefix + nodes[static_cast<std::size_t>(cluster.front())].label, *rel, true});
  }

  std::vector<RelationEdge> out;
  static constexpr char kAxisName[3] = {'x', 'y', 'z'};
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 n = Vec3::Zero();
    n[axis] = 1.0;
    const RigidTransform t = RigidTransform::Reflection(n, shape_center[axis]);
    std::map<std::string, SymmetryRelation> by_label;
    std::vector<std::string> label_order;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if (group_of[i] >= 0 && group_of[i] == group_of[j]) continue;
        if (!congruent(nodes[i].cage, nodes[j].cage, opts.congruence_frac, delta)) continue;
        auto perm = match_corners(nodes[i].cage.rest, t.apply(nodes[j].cage.rest), delta);
        if (!perm) continue;
        std::string key = nodes[i].label == nodes[j].label
                              ? nodes[i].label
                              : nodes[i].label + "_" + nodes[j].label;
        auto [it, fresh] = by_label.try_emplace(key);
        if (fresh) {
          label_order.push_back(key);
          it->second.type = SymmetryType::kReflection;
          it->second.normal = n;
          it->second.offset = shape_center[axis];
        }
        it->second.pairs.push_back({static_cast<int>(i), static_cast<int>(j), *perm, 1});
        it->second.members.push_back(static_cast<int>(i));
        it->second.members.push_back(static_cast<int>(j));
      }
    }
    for (const auto& key : label_order) {
      auto rel = by_label.at(key);
      std::sort(rel.members.begin(), rel.members.end());
      rel.members.erase(std::unique(rel.members.begin(), rel.members.end()), rel.members.end());
      out.push_back({std::string("refl_") + kAxisName[axis] + "_" + key, rel, true});
    }
  }
  for (auto& g : groups) out.push_back(std::move(g));
  return out;
}

}  // namespace shapeprog

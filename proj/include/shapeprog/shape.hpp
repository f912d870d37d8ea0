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

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shapeprog/geometry.hpp"
#include "shapeprog/mesh.hpp"

namespace shapeprog {

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyPart : public ShapeError {
 public:
  explicit EmptyPart(const std::string& id) : ShapeError("part '" + id + "' has no vertices") {}
};

class OutsideCage : public ShapeError {
 public:
  OutsideCage() : ShapeError("point lies outside the cage margin") {}
};

/// Box-initialized control hexahedron. `rest` follows the corner convention
/// in geometry.hpp; `axes` columns are the local u, v, w directions.
struct Hexahedron {
  CageCorners rest = CageCorners::Zero();
  Mat3 axes = Mat3::Identity();
  Vec3 center = Vec3::Zero();
  Vec3 half = Vec3::Zero();
  bool planar = false;

  static Hexahedron FromBox(const Vec3& center, const Mat3& axes, const Vec3& half,
                            bool planar = false);
  /// General hexahedron; the frame is estimated from mean edge directions.
  static Hexahedron FromCorners(const CageCorners& corners);

  Vec3 corner(int c) const { return rest.row(c).transpose(); }
  double volume() const;
};

Vec3 cage_center(const CageCorners& c);
Vec3 face_center(const CageCorners& c, int face);
Vec3 edge_midpoint(const CageCorners& c, int edge);

struct ShapeOptions {
  double relation_tol_frac = 1e-3;   // delta
  double contact_frac = 5e-3;        // contact epsilon
  double cage_margin_frac = 0.05;
  double snap_degrees = 5.0;
  double planar_frac = 1e-4;
  double min_thickness_frac = 1e-3;
  double congruence_frac = 0.02;
  double spacing_cv = 0.02;
};

struct PartNode {
  std::string id;
  std::string label;
  std::string phrase;  // e.g. "front left"; empty for unique labels
  Hexahedron cage;
  TriMesh mesh;
  std::vector<CageWeights> cage_coords;  // one row per mesh vertex

  /// "front left leg", or the bare label.
  std::string display_name() const;
};

enum class SymmetryType { kReflection, kTranslation, kRotation };

/// Cage of `a` matches T^power applied to cage of `b`:
/// H_a[perm[k]] ~ T^power(H_b[k]).
struct SymmetryPair {
  int a = 0;
  int b = 0;
  std::array<int, 8> perm{0, 1, 2, 3, 4, 5, 6, 7};
  int power = 1;
};

struct SymmetryRelation {
  SymmetryType type = SymmetryType::kReflection;
  Vec3 normal = Vec3::UnitX();  // reflection plane normal . p = offset
  double offset = 0.0;
  Vec3 step = Vec3::Zero();  // translation per member
  Vec3 axis = Vec3::UnitY();  // rotation axis through `center`
  Vec3 center = Vec3::Zero();
  double angle = 0.0;
  /// Groups: member k equals T^k applied to member 0. Reflections: every
  /// part appearing in a pair.
  std::vector<int> members;
  std::vector<SymmetryPair> pairs;

  RigidTransform transform() const;
  /// Transform T^power with corner permutation carrying part `from` onto
  /// part `to`, when both belong to the relation.
  std::optional<std::pair<RigidTransform, std::array<int, 8>>> map_between(int from,
                                                                           int to) const;
};

struct AttachPoint {
  CageWeights on_a{};
  CageWeights on_b{};
  Vec3 rest = Vec3::Zero();
};

struct AttachmentRelation {
  int a = 0;
  int b = 0;
  std::vector<AttachPoint> points;
};

struct RelationEdge {
  std::string id;
  std::variant<SymmetryRelation, AttachmentRelation> rel;
  bool enabled = true;

  bool is_symmetry() const { return std::holds_alternative<SymmetryRelation>(rel); }
  const SymmetryRelation& symmetry() const { return std::get<SymmetryRelation>(rel); }
  const AttachmentRelation& attachment() const { return std::get<AttachmentRelation>(rel); }
  std::vector<int> parts() const;
  std::string kind_name() const;  // reflection | translation | rotation | attachment
};

struct ShapeGraph {
  std::string name;
  double diag = 0.0;
  double delta = 0.0;        // relation tolerance
  double contact_eps = 0.0;  // contact distance
  double cage_margin = 0.0;
  std::vector<std::shared_ptr<const PartNode>> nodes;
  std::vector<RelationEdge> edges;
  std::vector<std::string> warnings;

  const PartNode& node(int i) const { return *nodes[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(nodes.size()); }
  int find_part(std::string_view id) const;
  int find_relation(std::string_view id) const;
  /// Derived view sharing nodes, with the named relations disabled.
  ShapeGraph with_disabled(const std::set<std::string, std::less<>>& ids) const;
};

struct PartInput {
  std::string id;
  std::string label;
  TriMesh mesh;
};

struct SegmentedMesh {
  std::string name;
  std::vector<PartInput> parts;
};

bool is_valid_part_id(std::string_view id);

/// Oriented bounding box: PCA, snapping to global axes, axes ordered and
/// signed to follow the global frame.
Hexahedron fit_cage(const TriMesh& mesh, double diag, const ShapeOptions& opts = {});

/// Trilinear weights of `p` in the cage; throws OutsideCage beyond `margin`.
CageWeights cage_coordinates(const Hexahedron& cage, const Vec3& p, double margin);
/// Local parameters (s, t, r) with p = trilinear(corners, s, t, r).
Vec3 invert_trilinear(const CageCorners& corners, const Vec3& p);

std::vector<RelationEdge> detect_symmetries(const std::vector<PartNode>& nodes,
                                            const Vec3& shape_center, double delta,
                                            const ShapeOptions& opts = {});
std::vector<RelationEdge> detect_attachments(const std::vector<PartNode>& nodes,
                                             double contact_eps, double margin);
void assign_directional_phrases(std::vector<PartNode>& nodes, double diag);

ShapeGraph build_graph(const SegmentedMesh& input, const ShapeOptions& opts = {});

/// Manifest: JSON {"name": ..., "parts": [{"id", "label", "file"}]} with
/// OBJ files relative to the manifest. A directory argument loads its
/// manifest.json.
SegmentedMesh load_manifest(const std::filesystem::path& path);

/// Pretty JSON graph serialization; cage coordinates are recomputed on load.
std::string serialize_graph(const ShapeGraph& g);
ShapeGraph parse_graph(const std::string& text);
void save_graph(const std::filesystem::path& path, const ShapeGraph& g);
ShapeGraph load_graph(const std::filesystem::path& path);

/// Worst rest-pose residual of a relation (max-norm).
double rest_residual(const ShapeGraph& g, const RelationEdge& e);

}  // namespace shapeprog

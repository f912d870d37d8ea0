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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shapeprog/compiled_expr.hpp"
#include "shapeprog/shape.hpp"
#include "shapeprog/sym_matrix.hpp"
#include "shapeprog/symbolic.hpp"

namespace shapeprog {

enum class OpKind { kTranslate, kScale, kRotate, kShear, kSymGroupCount, kSymGroupSpacing };

std::string_view op_keyword(OpKind k);  // translate scale rotate shear count spacing
std::optional<OpKind> op_from_keyword(std::string_view s);
inline bool is_group_op(OpKind k) {
  return k == OpKind::kSymGroupCount || k == OpKind::kSymGroupSpacing;
}

enum class Feature { kWhole, kFace, kEdge, kCorner };

/// `seat`, `seat.face1`, `seat.edge4`, `seat.corner7` or `@relation_id`.
struct Operand {
  bool relation = false;
  std::string name;
  Feature feature = Feature::kWhole;
  int index = 0;

  static Operand Part(std::string id) { return {false, std::move(id), Feature::kWhole, 0}; }
  static Operand Relation(std::string id) { return {true, std::move(id), Feature::kWhole, 0}; }
  static Operand FeatureOf(std::string id, Feature f, int index) {
    return {false, std::move(id), f, index};
  }
  std::string text() const;
  /// Corner indices moved by an op on this operand.
  std::vector<int> corners() const;
  bool operator==(const Operand&) const = default;
};

/// One edit. Static parameters by kind:
///   translate: axis = direction
///   scale, rotate: origin, axis
///   shear: origin, normal, axis = shear direction
///   count, spacing: none
/// Scale amounts are additive (factor 1 + amount) so every kind is the
/// identity at amount 0.
struct EditOp {
  OpKind kind = OpKind::kTranslate;
  Operand operand;
  SymExpr amount;
  Vec3 origin = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();
  Vec3 normal = Vec3::UnitY();

  bool operator==(const EditOp& o) const;
};

struct ControlParam {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const ControlParam&) const = default;
};

struct EditProgram {
  std::vector<ControlParam> params;
  std::vector<EditOp> ops;

  bool operator==(const EditProgram&) const = default;
  ParamRanges ranges() const;
  ParamAssignment zeros() const;
  std::vector<std::string> param_names() const;
  const ControlParam* find_param(std::string_view name) const;
};

class DslError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnknownPart : public DslError {
 public:
  explicit UnknownPart(const std::string& id) : DslError("unknown part '" + id + "'") {}
};
class UnknownRelation : public DslError {
 public:
  explicit UnknownRelation(const std::string& id) : DslError("unknown relation '" + id + "'") {}
};

/// Line-oriented program text:
///   param <name> [<lo>, <hi>]
///   op <kind> <operand> <amount> {<key>=<x> <y> <z>; ...}
/// `#` starts a comment line. Throws ParseError with line and column.
EditProgram parse_program(std::string_view text);
std::string print_program(const EditProgram& p);
std::string format_op(const EditOp& op);
EditProgram load_program(const std::filesystem::path& path);
void save_program(const std::filesystem::path& path, const EditProgram& p);

/// Semantic check against a graph; throws UnknownPart / UnknownRelation /
/// DslError.
void validate(const EditProgram& p, const ShapeGraph& g);

struct SymVec3 {
  SymExpr x, y, z;
};

/// Closed-form image of point `p` under `op` with symbolic amount.
SymVec3 apply_op_symbolic(const EditOp& op, const SymVec3& p);
/// Cage as a function of the control parameters after `ops` (in order).
/// Ops on other operands are ignored by the caller.
SymMatrix symbolic_apply(const CageCorners& rest, const std::vector<EditOp>& ops);
/// Numeric reference: evaluates each amount and applies the ops in turn.
CageCorners apply_numeric(const CageCorners& rest, const std::vector<EditOp>& ops,
                          const ParamAssignment& sigma);

/// Per-part symbolic cages (rest cages for unedited parts).
std::vector<SymMatrix> cage_functions(const ShapeGraph& g, const EditProgram& p);
std::vector<EditOp> ops_on_part(const EditProgram& p, std::string_view part_id);

struct ToleranceDefaults {
  double translate_frac = 0.5;  // of diag, also shear
  double scale = 1.0;
  double rotate = 1.5707963267948966;
};
/// Default upper bound of the parameter driving `op`.
double default_tau(const EditOp& op, const ShapeGraph& g, const ToleranceDefaults& d = {});

struct DeformedPart {
  int part = 0;      // source node
  int instance = 0;  // 0 for original parts, k for generated group members
  CageCorners cage;
  std::vector<Vec3> vertices;
};

struct DeformedShape {
  std::vector<DeformedPart> parts;
  std::vector<std::string> warnings;
};

enum class Exec { kSerial, kParallel };

/// Compiled program bound to a graph. Thread-safe for concurrent evaluate.
class ProgramEvaluator {
 public:
  ProgramEvaluator(const ShapeGraph& g, const EditProgram& p);

  /// Out-of-range values are clamped with a warning.
  DeformedShape evaluate(const ParamAssignment& sigma, Exec exec = Exec::kParallel) const;
  /// Cage corners only, without regenerating groups.
  std::vector<CageCorners> cages(const ParamAssignment& sigma) const;

  const EditProgram& program() const { return program_; }
  const ShapeGraph& graph() const { return graph_; }

 private:
  struct PartCode {
    bool edited = false;
    std::array<CompiledExpr, 24> entries;
  };
  struct GroupCode {
    int relation = 0;
    std::vector<CompiledExpr> count;
    std::vector<CompiledExpr> spacing;
  };

  std::vector<double> slot_values(const ParamAssignment& sigma,
                                  std::vector<std::string>* warnings) const;
  void eval_part(int i, std::span<const double> values, DeformedPart& out) const;
  void apply_groups(std::span<const double> values, DeformedShape& out) const;

  ShapeGraph graph_;
  EditProgram program_;
  std::vector<std::string> slots_;
  std::vector<PartCode> code_;
  std::vector<GroupCode> groups_;
};

DeformedShape evaluate(const EditProgram& p, const ShapeGraph& g, const ParamAssignment& sigma);

/// Concatenation; p2 parameters colliding with p1 are renamed name_2, name_3...
EditProgram compose(const EditProgram& p1, const EditProgram& p2);

/// Writes deformed meshes as OBJ: one file per part (`<id>.obj`,
/// `<id>_<k>.obj` for generated members) or a single `shape.obj`.
std::vector<std::filesystem::path> export_meshes(const DeformedShape& d, const ShapeGraph& g,
                                                 const std::filesystem::path& dir, bool merged);
TriMesh deformed_mesh(const DeformedShape& d, const ShapeGraph& g);

}  // namespace shapeprog

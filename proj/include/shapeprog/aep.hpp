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

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shapeprog/dsl.hpp"
#include "shapeprog/sampling.hpp"

namespace shapeprog {

/// Placeholder parameter for the amount being solved.
inline constexpr std::string_view kUnknownAmount = "unknown_";

enum class ConstraintKind { kSymmetry, kAttachment };

/// Residual rows that must stay below `delta` (infinity norm) for the
/// relation `source` to hold.
struct Constraint {
  SymMatrix residual;  // k x 3
  std::string source;
  ConstraintKind kind = ConstraintKind::kAttachment;
  double delta = 0.0;
  int part_a = -1;
  int part_b = -1;
  /// Set when built for a solve target: rest point of the target's side of
  /// each row, and the sign of that side in the residual.
  std::vector<Vec3> target_rest;
  int target_sign = 0;
};

/// Rows of `m` mapped through `t` (points, not vectors).
SymMatrix transform_rows(const RigidTransform& t, const SymMatrix& m);

/// Constraints of edge `edge` given per-part symbolic cages. Symmetry
/// relations give one constraint per pair. `target` (optional) fills the
/// rest points used by rotation solving.
std::vector<Constraint> relation_constraints(const ShapeGraph& g, int edge,
                                             const std::vector<SymMatrix>& cages, int target = -1);

/// Numeric SAT: `n_samples` uniform assignments plus the all-low and
/// all-high endpoints.
bool check_sat(const SymMatrix& residual, double delta, const ParamRanges& ranges,
               int n_samples = 16, std::uint64_t seed = kDefaultSatSeed);
bool check_sat(const Constraint& c, const ParamRanges& ranges, int n_samples = 16,
               std::uint64_t seed = kDefaultSatSeed);
bool relation_holds(const ShapeGraph& g, int edge, const std::vector<SymMatrix>& cages,
                    const ParamRanges& ranges, int n_samples = 16,
                    std::uint64_t seed = kDefaultSatSeed);

/// T o op o T^-1. Reflections flip direction vectors; rotation axes are
/// pseudo-vectors and pick up det(T). The amount is unchanged.
EditOp conjugate(const EditOp& op, const RigidTransform& t);
/// Operand on `target` covering the corners perm[k] of the corners of `o`.
std::optional<Operand> map_operand(const Operand& o, const std::array<int, 8>& perm,
                                   const std::string& target);

enum class HintKind { kTranslate, kRotate, kScale };
std::string_view hint_keyword(HintKind k);
std::optional<HintKind> hint_from_keyword(std::string_view s);
/// Scale admits scale and shear.
bool hint_admits(HintKind hint, OpKind kind);
using HintMap = std::map<std::string, HintKind, std::less<>>;

enum class Provenance { kSelf, kNeighbor };

struct CandidateEdit {
  EditOp op;  // amount is the unknown placeholder
  Provenance provenance = Provenance::kSelf;
};

/// Candidates for `part` in a fixed order: translate along the 3 local and
/// the 3 global axes; scale about the center and 6 face centers along the 3
/// local axes; rotate about the center, 6 face centers and 12 edge midpoints
/// around the 3 local axes; shear about the center for every ordered pair
/// of local axes. Neighbor variants reuse each neighbor's edit parameters
/// and the same feature sets taken from the neighbor's rest cage.
std::vector<CandidateEdit> enumerate_candidates(const ShapeGraph& g, int part,
                                                std::optional<HintKind> hint = std::nullopt,
                                                std::span<const int> neighbors = {},
                                                bool use_nhbd = false,
                                                const EditProgram* program = nullptr);

struct SolveOutcome {
  EditOp edit;
  int candidate = 0;
  Provenance provenance = Provenance::kSelf;
  std::vector<std::string> satisfied;  // constraint sources, one per constraint
  std::vector<std::string> broken;
  std::vector<int> satisfied_index;  // indices into the constraint list
  double arap_energy = 0.0;
  int sym_planes = 0;
};

struct SolveSetup {
  CageCorners rest;  // target rest cage
  ParamRanges ranges;
  ParamAssignment reference;  // usually mid-range
  double delta = 1e-3;
  int n_samples = 16;
  std::uint64_t seed = kDefaultSatSeed;
  /// Existing amounts; solutions probably equal to one are replaced by it.
  std::vector<SymExpr> snap;
};

class NoFeasibleSolution : public std::runtime_error {
 public:
  NoFeasibleSolution() : std::runtime_error("no feasible amount") {}
};

/// Solves each scalar residual for the unknown amount, then classifies every
/// distinct non-zero solution against all constraints. Throws
/// NoFeasibleSolution when no equation yields a solution.
std::vector<SolveOutcome> solve_amount(const CandidateEdit& candidate,
                                       const std::vector<Constraint>& constraints,
                                       const SolveSetup& setup);

/// ||F - R(F)||_F^2 for the best-fit affine map rest -> deformed.
double arap_energy(const CageCorners& rest, const CageCorners& deformed);
/// Local mid-planes of `rest` that remain symmetry planes of `deformed`.
int symmetry_planes(const CageCorners& deformed, double delta);

/// Fewest broken, then lowest energy, then most planes, then candidate order.
bool outcome_better(const SolveOutcome& a, const SolveOutcome& b);
const SolveOutcome& select(std::span<const SolveOutcome> outcomes);

struct PropagateOptions {
  HintMap hints;
  std::set<std::string, std::less<>> disabled;
  bool use_nhbd = true;
  bool use_breaking = true;
  Exec exec = Exec::kParallel;
  int n_samples = 16;
  std::uint64_t seed = kDefaultSatSeed;
};

struct ConjugateAction {
  std::string relation;
  std::string from;
  std::string to;
  std::vector<EditOp> ops;
};

struct SolveAction {
  std::string part;
  int candidates = 0;
  int solutions = 0;
  int satisfying = 0;
  bool used_nhbd = false;
  std::optional<SolveOutcome> selected;  // empty when stalled
};

struct SolverRound {
  int index = 0;
  std::vector<std::string> broken;
  std::vector<ConjugateAction> conjugations;
  std::optional<SolveAction> solve;
};

/// A selected corrective edit with the constraint set it was solved
/// against (residuals in terms of the unknown amount).
struct SolvedEdit {
  int part = -1;
  EditOp op;
  std::vector<Constraint> constraints;
  SolveOutcome outcome;
};

struct PropagationResult {
  EditProgram program;
  std::vector<SolverRound> rounds;
  std::vector<SolvedEdit> solved;
  std::vector<std::string> stalled;  // part ids left unedited
  std::map<std::string, bool, std::less<>> relation_state;  // enabled relations only
  std::vector<std::string> warnings;
};

class PropagationStalled : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Extends the seed program with corrective edits until no enabled relation
/// between an edited and an unedited part is broken.
PropagationResult propagate(const ShapeGraph& g, const EditProgram& seeds,
                            const PropagateOptions& opts = {});

/// Human-readable solver log.
std::string format_report(const PropagationResult& r);

/// Symbolic cages of all parts under `p` (no group regeneration).
std::vector<SymMatrix> program_cages(const ShapeGraph& g, const EditProgram& p);
/// Relation id -> maintained, for every enabled relation.
std::map<std::string, bool, std::less<>> relation_states(const ShapeGraph& g, const EditProgram& p,
                                                         int n_samples = 16,
                                                         std::uint64_t seed = kDefaultSatSeed);

}  // namespace shapeprog
